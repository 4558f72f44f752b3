#pragma once

#include <span>
#include <vector>

namespace evcap::queueing {

/// Largest server count accepted by the service-level function. Factorials
/// are tabulated as doubles up to this size.
inline constexpr int kMaxServers = 30;

/// Queue parameters shared by every station: per-post service rate, required
/// service level and the tolerated queue length.
struct QueueConfig {
  double mu = 1.0;
  double alpha = 0.9;
  int b = 0;

  /// Throws DomainError unless mu > 0, 0 < alpha < 1 and b >= 0.
  void validate() const;

  friend bool operator==(const QueueConfig&, const QueueConfig&) = default;
};

/// Left-hand side of the service-level inequality for m servers, queue
/// threshold b and aggregate traffic rho = lambda / mu:
///
///   L(m, b, rho) = sum_{k=0}^{m-1} (m - k) m! m^b / k! * rho^-(m + b + 1 - k)
///
/// The requirement P(at most b waiting) >= alpha is equivalent to
/// L(m, b, rho) >= 1 / (1 - alpha). L is strictly decreasing in rho.
double service_level_lhs(int m, int b, double rho);

/// Largest aggregate traffic rho admissible with m servers at service level
/// alpha, i.e. the root of L(m, b, rho) = 1 / (1 - alpha). Bisection on the
/// bracket [1e-9, m], doubling the upper end until L drops below the target.
/// On return |L - target| <= tol * target.
double rho_alpha(int m, int b, double alpha, double tol = 1e-10);

/// Utilization thresholds rho_{alpha,k} for k = 1..max_posts.
class RhoTable {
 public:
  RhoTable() = default;

  /// Computes every entry and checks that the sequence strictly increases.
  static RhoTable build(int max_posts, int b, double alpha);

  /// Threshold for k posts, 1 <= k <= max_posts().
  double operator[](int k) const { return values_[static_cast<std::size_t>(k - 1)]; }

  int max_posts() const noexcept { return static_cast<int>(values_.size()); }
  double alpha() const noexcept { return alpha_; }
  int b() const noexcept { return b_; }
  std::span<const double> values() const noexcept { return values_; }

 private:
  double alpha_ = 0.0;
  int b_ = 0;
  std::vector<double> values_;
};

/// Steady-state measures of an M/M/s queue. Times are in the same unit as
/// 1/mu (hours throughout this project).
struct QueueMeasures {
  double wq = 0.0;      // mean wait in queue
  double lq = 0.0;      // mean queue length
  double p0 = 1.0;      // probability the system is empty
  double p_le_b = 1.0;  // probability that at most b customers are waiting
  bool stable = true;

  double wq_minutes() const noexcept { return wq * 60.0; }
};

/// M/M/s birth-death steady state for arrival rate lambda, per-server rate mu,
/// s servers and queue threshold b. Unstable systems (lambda / (s mu) >= 1)
/// report stable = false with infinite wq/lq and zero probabilities.
QueueMeasures mms_measures(double lambda, double mu, int s, int b);

}  // namespace evcap::queueing

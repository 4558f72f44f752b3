#include "evcap/queueing.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "evcap/errors.hpp"

namespace evcap::queueing {

namespace {

constexpr std::array<double, kMaxServers + 1> make_factorials() {
  std::array<double, kMaxServers + 1> f{};
  f[0] = 1.0;
  for (int i = 1; i <= kMaxServers; ++i) f[i] = f[i - 1] * i;
  return f;
}

constexpr auto kFactorial = make_factorials();

void check_servers(int m) {
  if (m < 1 || m > kMaxServers) {
    throw DomainError("server count must lie in [1, " + std::to_string(kMaxServers) +
                      "], got " + std::to_string(m));
  }
}

}  // namespace

void QueueConfig::validate() const {
  if (!(mu > 0.0)) throw DomainError("queue.mu must be positive");
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("queue.alpha must lie in (0, 1)");
  if (b < 0) throw DomainError("queue.b must be nonnegative");
}

double service_level_lhs(int m, int b, double rho) {
  check_servers(m);
  if (b < 0) throw DomainError("queue threshold b must be nonnegative");
  if (!(rho > 0.0)) throw DomainError("rho must be positive");

  const double scale = kFactorial[m] * std::pow(static_cast<double>(m), b);
  double sum = 0.0;
  for (int k = 0; k < m; ++k) {
    const double exponent = static_cast<double>(m + b + 1 - k);
    sum += (m - k) * scale / kFactorial[k] * std::pow(rho, -exponent);
  }
  return sum;
}

double rho_alpha(int m, int b, double alpha, double tol) {
  check_servers(m);
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
  if (!(tol > 0.0)) throw DomainError("tolerance must be positive");

  const double target = 1.0 / (1.0 - alpha);
  double lo = 1e-9;
  double hi = static_cast<double>(m);
  const double hi_limit = std::ldexp(static_cast<double>(m), 40);
  while (service_level_lhs(m, b, hi) > target) {
    hi *= 2.0;
    if (hi > hi_limit) {
      throw ConvergenceError("rho_alpha: bracket expansion exceeded 2^40 * m");
    }
  }
  while (service_level_lhs(m, b, lo) < target) {
    lo *= 0.5;
    if (lo < std::numeric_limits<double>::min()) {
      throw ConvergenceError("rho_alpha: could not bracket the root from below");
    }
  }

  double best = 0.5 * (lo + hi);
  double best_err = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < 400; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) break;  // bracket exhausted in double precision
    const double value = service_level_lhs(m, b, mid);
    const double err = std::abs(value - target);
    if (err < best_err) {
      best = mid;
      best_err = err;
    }
    if (err <= tol * target) return mid;
    if (value > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  if (best_err <= tol * target) return best;
  throw ConvergenceError("rho_alpha: tolerance not reachable in double precision");
}

RhoTable RhoTable::build(int max_posts, int b, double alpha) {
  if (max_posts < 1) throw DomainError("RhoTable needs at least one post");
  RhoTable table;
  table.alpha_ = alpha;
  table.b_ = b;
  table.values_.reserve(static_cast<std::size_t>(max_posts));
  for (int k = 1; k <= max_posts; ++k) {
    const double rho = rho_alpha(k, b, alpha);
    if (!table.values_.empty() && !(rho > table.values_.back())) {
      throw ConvergenceError("RhoTable: thresholds not strictly increasing at k = " +
                             std::to_string(k));
    }
    table.values_.push_back(rho);
  }
  return table;
}

QueueMeasures mms_measures(double lambda, double mu, int s, int b) {
  if (!(mu > 0.0)) throw DomainError("mms_measures: mu must be positive");
  if (s < 1) throw DomainError("mms_measures: need at least one server");
  if (b < 0) throw DomainError("mms_measures: b must be nonnegative");
  if (lambda < 0.0) throw DomainError("mms_measures: lambda must be nonnegative");

  QueueMeasures q;
  if (lambda == 0.0) return q;

  const double a = lambda / mu;
  const double r = a / s;
  if (r >= 1.0) {
    q.stable = false;
    q.wq = q.lq = std::numeric_limits<double>::infinity();
    q.p0 = 0.0;
    q.p_le_b = 0.0;
    return q;
  }

  // Unnormalised state weights t_n = a^n / n! for n <= s, built by recurrence.
  double t = 1.0;
  double head = 1.0;  // sum_{n=0}^{s-1} t_n
  for (int n = 1; n < s; ++n) {
    t *= a / n;
    head += t;
  }
  const double ts = t * a / s;  // a^s / s!
  const double norm = head + ts / (1.0 - r);
  q.p0 = 1.0 / norm;
  q.lq = q.p0 * ts * r / ((1.0 - r) * (1.0 - r));
  q.wq = q.lq / lambda;

  // P(N <= s + b) = P(N <= s - 1) + P_s * (1 - r^{b+1}) / (1 - r)
  const double tail = ts * (1.0 - std::pow(r, b + 1)) / (1.0 - r);
  q.p_le_b = std::min(1.0, (head + tail) * q.p0);
  return q;
}

}  // namespace evcap::queueing

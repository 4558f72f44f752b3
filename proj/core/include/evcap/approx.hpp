#pragma once

#include <span>

#include "evcap/deployment.hpp"
#include "evcap/instance.hpp"
#include "evcap/milp.hpp"

namespace evcap::approx {

inline constexpr double kPositive = 1e-6;

/// Post count for relaxed indicators y (entry k-1 for k posts): the largest
/// k whose value exceeds eps, or 0 when every entry is at most eps.
int round_posts(std::span<const double> y, double eps = kPositive);

struct Result {
  Deployment deployment;
  double z_appr = 0.0;  // objective of the rounded deployment
  double lb = 0.0;      // proven bound of the relaxation
  double gap_lb = 0.0;  // (z_appr - lb) / z_appr
  milp::MipStatus status = milp::MipStatus::Infeasible;
  double seconds = 0.0;
};

/// Solves the post-relaxed model, rounds each station up to its largest
/// supported post count and evaluates the result. Post counts are also
/// lifted to the parent's count so the non-decreasing rule holds along
/// every path. Throws InfeasibleError when the relaxation is infeasible and
/// TimeLimitError when the limits expire before it has an incumbent.
Result approximate(const Instance& inst, const milp::MipLimits& limits = {},
                   const milp::Solver& solver = milp::embedded_solver());

}  // namespace evcap::approx

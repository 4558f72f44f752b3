#include "evcap/approx.hpp"

#include <algorithm>
#include <chrono>

#include "evcap/errors.hpp"
#include "evcap/formulation.hpp"

namespace evcap::approx {

int round_posts(std::span<const double> y, double eps) {
  for (std::size_t k = y.size(); k > 0; --k) {
    if (y[k - 1] > eps) return static_cast<int>(k);
  }
  return 0;
}

Result approximate(const Instance& inst, const milp::MipLimits& limits, const milp::Solver& solver) {
  const auto start = std::chrono::steady_clock::now();
  const auto built = build_revcec(inst);
  const auto sol = solver.solve_mip(built.model, limits);
  if (sol.status == milp::MipStatus::Infeasible) throw InfeasibleError("post-relaxed model is infeasible");
  if (!sol.has_incumbent()) throw TimeLimitError("post-relaxed model: limit reached without a feasible point");

  Result r;
  r.status = sol.status;
  r.deployment = Deployment::closed(inst);
  for (int n = 0; n < inst.num_nodes(); ++n) {
    const int parent = inst.tree[static_cast<std::size_t>(n)].parent;
    for (int j = 0; j < inst.num_locations(); ++j) {
      const auto& v = built.index.nodes[static_cast<std::size_t>(n)];
      if (sol.values[static_cast<std::size_t>(v.x[static_cast<std::size_t>(j)])] < 0.5) continue;
      int k = std::max(1, round_posts(post_weights(built.index, sol.values, n, j)));
      if (parent != kInitialState) k = std::max(k, r.deployment.posts(static_cast<std::size_t>(parent), static_cast<std::size_t>(j)));
      r.deployment.set(n, j, k);
    }
  }
  r.z_appr = objective_value(inst, r.deployment);
  r.lb = sol.bound;
  r.gap_lb = (r.z_appr - r.lb) / r.z_appr;
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace evcap::approx

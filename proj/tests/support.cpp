#include "support.hpp"

#include <algorithm>
#include <random>

#include "evcap/formulation.hpp"
#include "evcap/generator.hpp"

namespace evcap::test_support {

Instance tiny_instance(std::uint64_t seed, int b, int m_max) {
  auto p = preset_params(Preset::Tiny, m_max);
  p.n_zones = 5;
  p.n_locations = 6;
  p.queue.b = 0;
  Instance inst = generate(p, seed);
  inst.queue.b = b;
  return inst;
}

Instance hand_instance(const std::vector<std::vector<double>>& dist, double w, double bcoef,
                       int m_max, double mu) {
  Instance inst;
  const std::size_t ni = dist.size();
  const std::size_t nj = dist.front().size();
  for (std::size_t i = 0; i < ni; ++i) inst.zones.push_back({static_cast<int>(i), 1.0});
  for (std::size_t j = 0; j < nj; ++j) inst.locations.push_back({static_cast<int>(j), m_max, false, 0});
  inst.dist = Grid<double>(ni, nj);
  for (std::size_t i = 0; i < ni; ++i) {
    for (std::size_t j = 0; j < nj; ++j) inst.dist(i, j) = dist[i][j];
  }
  ScenarioNode root;
  root.w.assign(ni, w);
  root.bcoef.assign(ni, bcoef);
  root.theta.assign(ni, 1.0);
  root.radius.assign(ni, 10.0);
  root.cost_build.assign(nj, 1.0);
  root.cost_post.assign(nj, 1.0);
  root.cost_op_station.assign(nj, 1.0);
  root.cost_op_post.assign(nj, 1.0);
  inst.tree.push_back(root);
  inst.queue = {mu, 0.9, 0};
  return inst;
}

Instance as_chain(const Instance& inst, int length) {
  Instance out = inst;
  for (int n = 1; n < length; ++n) {
    ScenarioNode node = inst.tree.front();
    node.id = n;
    node.parent = n - 1;
    out.tree.push_back(node);
  }
  return out;
}

Optimum mip_optimum(const Instance& inst) {
  const auto built = build_evcec(inst);
  milp::MipLimits lim;
  lim.gap_tol = 1e-9;
  const auto sol = milp::solve_mip(built.model, lim);
  Optimum o{sol.status, sol.objective, Deployment::closed(inst)};
  if (sol.has_incumbent()) o.dep = decode(inst, built.index, sol.values);
  return o;
}

std::optional<Optimum> brute_force(const Instance& inst) {
  const int nn = inst.num_nodes();
  const int nj = inst.num_locations();
  std::vector<int> digits(static_cast<std::size_t>(nn * nj), 0);
  std::optional<Optimum> best;
  for (;;) {
    Deployment dep = Deployment::closed(inst);
    for (int n = 0; n < nn; ++n) {
      for (int j = 0; j < nj; ++j) dep.set(n, j, digits[static_cast<std::size_t>(n * nj + j)]);
    }
    if (check_feasible(inst, dep).feasible) {
      const double z = objective_value(inst, dep);
      if (!best || z < best->z) best = Optimum{milp::MipStatus::Optimal, z, dep};
    }
    std::size_t k = 0;
    while (k < digits.size()) {
      const int m = inst.locations[k % static_cast<std::size_t>(nj)].m_max;
      if (++digits[k] <= m) break;
      digits[k++] = 0;
    }
    if (k == digits.size()) break;
  }
  return best;
}

Deployment random_monotone_deployment(const Instance& inst, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Deployment dep = Deployment::closed(inst);
  for (int n = 0; n < inst.num_nodes(); ++n) {
    const int parent = inst.tree[static_cast<std::size_t>(n)].parent;
    for (int j = 0; j < inst.num_locations(); ++j) {
      const auto& loc = inst.locations[static_cast<std::size_t>(j)];
      int floor = parent == kInitialState ? loc.y0 : dep.posts(static_cast<std::size_t>(parent), static_cast<std::size_t>(j));
      if (parent == kInitialState && loc.x0) floor = std::max(floor, 1);
      std::uniform_int_distribution<int> pick(floor, loc.m_max);
      dep.set(n, j, pick(rng));
    }
  }
  return dep;
}

}  // namespace evcap::test_support

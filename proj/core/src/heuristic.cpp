#include "evcap/heuristic.hpp"

#include <algorithm>
#include <limits>
#include <vector>

#include "evcap/errors.hpp"

namespace evcap::heuristic {

namespace {

std::size_t sz(int v) { return static_cast<std::size_t>(v); }

double opening_cost(const ScenarioNode& node, int j) {
  return node.cost_build[sz(j)] + node.cost_op_station[sz(j)] + node.cost_post[sz(j)] +
         node.cost_op_post[sz(j)];
}

// Picks among `candidates` (ascending ids); `zones` gives the number of zones
// each candidate would serve. Ties go to the lowest id.
int choose(const ScenarioNode& node, const std::vector<int>& candidates,
           const std::vector<int>& zones, Criterion criterion) {
  int best = -1;
  double best_score = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    const int j = candidates[c];
    double score = 0.0;
    switch (criterion) {
      case Criterion::MostZones: score = -static_cast<double>(zones[c]); break;
      case Criterion::LowestCost: score = opening_cost(node, j); break;
      case Criterion::LowestCostPerZone:
        score = opening_cost(node, j) / std::max(1, zones[c]);
        break;
    }
    if (score < best_score) {
      best_score = score;
      best = j;
    }
  }
  return best;
}

}  // namespace

std::string to_string(Criterion c) {
  switch (c) {
    case Criterion::MostZones: return "most_zones";
    case Criterion::LowestCost: return "lowest_cost";
    case Criterion::LowestCostPerZone: return "lowest_cost_per_zone";
  }
  return "unknown";
}

Criterion parse_criterion(std::string_view name) {
  if (name == "most_zones") return Criterion::MostZones;
  if (name == "lowest_cost") return Criterion::LowestCost;
  if (name == "lowest_cost_per_zone") return Criterion::LowestCostPerZone;
  throw ParameterError("unknown criterion '" + std::string(name) + "'");
}

std::optional<int> min_posts(double lambda, double mu, const queueing::RhoTable& rho, int m_max,
                             int floor_k) {
  for (int k = std::max(1, floor_k); k <= m_max; ++k) {
    if (mu * rho[k] >= lambda) return k;
  }
  return std::nullopt;
}

std::optional<Deployment> repair(const Instance& inst, const Grid<std::uint8_t>& seed,
                                 const Grid<std::uint8_t>& banned, Criterion criterion) {
  const auto cov = coverage_sets(inst);
  const auto rho = rho_table_for(inst);
  const int nj = inst.num_locations();
  const double mu = inst.queue.mu;
  Deployment dep = Deployment::closed(inst);

  for (int n = 0; n < inst.num_nodes(); ++n) {
    const auto& node = inst.tree[sz(n)];
    std::vector<std::uint8_t> open(sz(nj), 0);
    std::vector<int> floor(sz(nj), 0);
    for (int j = 0; j < nj; ++j) {
      const auto& loc = inst.locations[sz(j)];
      const bool inherited = node.parent == kInitialState ? loc.x0 : dep.open(sz(node.parent), sz(j)) != 0;
      floor[sz(j)] = node.parent == kInitialState ? loc.y0 : dep.posts(sz(node.parent), sz(j));
      if (inherited && banned(sz(n), sz(j))) return std::nullopt;
      open[sz(j)] = inherited || (seed(sz(n), sz(j)) && !banned(sz(n), sz(j)));
    }
    auto closed_allowed = [&](int j) { return !open[sz(j)] && !banned(sz(n), sz(j)); };

    // Coverage, zone by zone in id order.
    for (int i = 0; i < inst.num_zones(); ++i) {
      const auto& near = cov.locs_near[sz(n)][sz(i)];
      if (std::any_of(near.begin(), near.end(), [&](int j) { return open[sz(j)] != 0; })) continue;
      std::vector<int> cands, zones;
      for (int j : near) {
        if (!closed_allowed(j)) continue;
        int uncovered = 0;
        for (int z : cov.zones_near[sz(n)][sz(j)]) {
          const auto& zn = cov.locs_near[sz(n)][sz(z)];
          uncovered += std::none_of(zn.begin(), zn.end(), [&](int k) { return open[sz(k)] != 0; });
        }
        cands.push_back(j);
        zones.push_back(uncovered);
      }
      if (cands.empty()) return std::nullopt;
      open[sz(choose(node, cands, zones, criterion))] = 1;
    }

    // Size posts; open another station while some station cannot cope.
    std::vector<int> posts(sz(nj), 0);
    for (;;) {
      const auto lambda = demand_rates(inst, cov, open, n);
      std::vector<int> overloaded;
      for (int j = 0; j < nj; ++j) {
        if (!open[sz(j)]) {
          posts[sz(j)] = 0;
          continue;
        }
        const auto k = min_posts(lambda[sz(j)], mu, rho, inst.locations[sz(j)].m_max, floor[sz(j)]);
        if (k) posts[sz(j)] = *k;
        else overloaded.push_back(j);
      }
      if (overloaded.empty()) break;

      std::vector<int> cands, zones;
      for (int j = 0; j < nj; ++j) {
        if (!closed_allowed(j)) continue;
        const bool shares = std::any_of(overloaded.begin(), overloaded.end(), [&](int o) {
          for (int z : cov.zones_near[sz(n)][sz(o)]) {
            if (cov.covers(n, z, j)) return true;
          }
          return false;
        });
        if (shares) {
          cands.push_back(j);
          zones.push_back(static_cast<int>(cov.zones_near[sz(n)][sz(j)].size()));
        }
      }
      if (cands.empty()) {
        for (int j = 0; j < nj; ++j) {
          if (!closed_allowed(j)) continue;
          cands.push_back(j);
          zones.push_back(static_cast<int>(cov.zones_near[sz(n)][sz(j)].size()));
        }
      }
      if (cands.empty()) return std::nullopt;
      open[sz(choose(node, cands, zones, criterion))] = 1;
    }

    for (int j = 0; j < nj; ++j) dep.set(n, j, posts[sz(j)]);
  }
  return dep;
}

Deployment greedy(const Instance& inst, Criterion criterion) {
  const Grid<std::uint8_t> none(sz(inst.num_nodes()), sz(inst.num_locations()), 0);
  auto dep = repair(inst, none, none, criterion);
  if (!dep) {
    throw InfeasibleError("greedy (" + to_string(criterion) +
                          "): demand cannot be absorbed even with every location open");
  }
  return *dep;
}

Deployment best_greedy(const Instance& inst) {
  std::optional<Deployment> best;
  double best_z = std::numeric_limits<double>::infinity();
  for (auto c : {Criterion::MostZones, Criterion::LowestCost, Criterion::LowestCostPerZone}) {
    try {
      auto dep = greedy(inst, c);
      const double z = objective_value(inst, dep);
      if (z < best_z) {
        best_z = z;
        best = std::move(dep);
      }
    } catch (const InfeasibleError&) {
    }
  }
  if (!best) throw InfeasibleError("no greedy criterion produced a feasible deployment");
  return *best;
}

Deployment local_search(const Instance& inst, const Deployment& start) {
  Deployment best = start;
  double best_z = objective_value(inst, best);
  const auto rows = sz(inst.num_nodes());
  const auto cols = sz(inst.num_locations());
  bool improved = true;
  while (improved) {
    improved = false;
    for (int j = 0; j < inst.num_locations(); ++j) {
      if (inst.locations[sz(j)].x0) continue;
      bool used = false;
      for (std::size_t n = 0; n < rows; ++n) used = used || best.open(n, sz(j));
      if (!used) continue;

      Grid<std::uint8_t> seed = best.open;
      Grid<std::uint8_t> banned(rows, cols, 0);
      for (std::size_t n = 0; n < rows; ++n) {
        seed(n, sz(j)) = 0;
        banned(n, sz(j)) = 1;
      }
      auto cand = repair(inst, seed, banned, Criterion::MostZones);
      if (!cand) continue;
      const double z = objective_value(inst, *cand);
      if (z < best_z - 1e-9) {
        best = std::move(*cand);
        best_z = z;
        improved = true;
      }
    }
  }
  return best;
}

}  // namespace evcap::heuristic

#include "evcap/generator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "evcap/deployment.hpp"
#include "evcap/errors.hpp"

namespace evcap {

namespace {

std::size_t sz(int v) { return static_cast<std::size_t>(v); }

// Uniform draw built from raw engine output so sequences do not depend on
// the standard library's distribution implementation.
double draw(std::mt19937_64& rng, Range r) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return r.lo + (r.hi - r.lo) * u;
}

int draw_index(std::mt19937_64& rng, int n) {
  return static_cast<int>(rng() % static_cast<std::uint64_t>(n));
}

bool all_open_absorbs_demand(const Instance& inst, const CoverageSets& cov,
                             const queueing::RhoTable& rho) {
  const std::vector<std::uint8_t> all_open(sz(inst.num_locations()), 1);
  for (int n = 0; n < inst.num_nodes(); ++n) {
    const auto lambda = demand_rates(inst, cov, all_open, n);
    for (int j = 0; j < inst.num_locations(); ++j) {
      const int m = inst.locations[sz(j)].m_max;
      if (lambda[sz(j)] > inst.queue.mu * rho[m] * (1.0 - 1e-9)) return false;
    }
  }
  return true;
}

}  // namespace

int GeneratorParams::node_count() const {
  if (branching == 1) return depth;
  int total = 0;
  int level = 1;
  for (int d = 0; d < depth; ++d) {
    total += level;
    level *= branching;
  }
  return total;
}

void GeneratorParams::validate() const {
  auto need = [](bool ok, const std::string& msg) {
    if (!ok) throw ParameterError(msg);
  };
  need(n_zones >= 1, "n_zones must be at least 1");
  need(n_locations >= 1, "n_locations must be at least 1");
  need(depth >= 1, "depth must be at least 1");
  need(branching >= 1, "branching must be at least 1");
  need(m_max >= 1 && m_max <= queueing::kMaxServers, "m_max must lie in [1, 30]");
  need(initial_stations >= 0 && initial_stations <= n_locations,
       "initial_stations must lie in [0, n_locations]");
  need(side > 0.0, "side must be positive");
  for (const Range& r : {decay, demand, growth, influence, coverage_target, radius, cost_build,
                         cost_post, cost_op_station, cost_op_post, cost_drift}) {
    need(r.lo <= r.hi && r.lo >= 0.0, "ranges must satisfy 0 <= lo <= hi");
  }
  need(decay.lo > 0.0, "decay range must be positive");
  need(radius.lo > 0.0, "radius range must be positive");
  need(coverage_target.hi <= 1.0, "coverage target must lie in [0, 1]");
  need(node_count() <= 100000, "scenario tree too large");
  try {
    queue.validate();
  } catch (const DomainError& e) {
    throw ParameterError(e.what());
  }
}

GeneratorParams preset_params(Preset preset, int m_max) {
  GeneratorParams p;
  p.m_max = m_max;
  switch (preset) {
    case Preset::Tiny:
      p.n_zones = 4;
      p.n_locations = 5;
      p.depth = 2;
      p.branching = 2;
      break;
    case Preset::Small:
      p.n_zones = 10;
      p.n_locations = 15;
      p.depth = 2;
      p.branching = 7;
      p.demand = {0.5, 1.5};
      break;
    case Preset::Medium:
      p.n_zones = 10;
      p.n_locations = 25;
      p.depth = 2;
      p.branching = 15;
      p.demand = {0.5, 1.5};
      break;
  }
  return p;
}

Preset parse_preset(std::string_view name) {
  if (name == "tiny") return Preset::Tiny;
  if (name == "small") return Preset::Small;
  if (name == "medium") return Preset::Medium;
  throw ParameterError("unknown preset '" + std::string(name) + "' (expected tiny, small or medium)");
}

Instance generate(const GeneratorParams& params, std::uint64_t seed) {
  params.validate();
  std::mt19937_64 rng(seed);
  const int ni = params.n_zones;
  const int nj = params.n_locations;

  Instance inst;
  inst.seed = seed;
  inst.queue = params.queue;

  std::vector<std::pair<double, double>> zone_xy(sz(ni)), loc_xy(sz(nj));
  for (auto& p : zone_xy) p = {draw(rng, {0.0, params.side}), draw(rng, {0.0, params.side})};
  for (auto& p : loc_xy) p = {draw(rng, {0.0, params.side}), draw(rng, {0.0, params.side})};

  for (int i = 0; i < ni; ++i) inst.zones.push_back(Zone{i, draw(rng, params.decay)});
  for (int j = 0; j < nj; ++j) inst.locations.push_back(Location{j, params.m_max, false, 0});
  for (int s = 0; s < params.initial_stations; ++s) {
    int j = draw_index(rng, nj);
    while (inst.locations[sz(j)].x0) j = (j + 1) % nj;
    inst.locations[sz(j)].x0 = true;
    inst.locations[sz(j)].y0 = 1 + draw_index(rng, std::min(2, params.m_max));
  }

  inst.dist = Grid<double>(sz(ni), sz(nj));
  for (int i = 0; i < ni; ++i) {
    for (int j = 0; j < nj; ++j) {
      const double dx = zone_xy[sz(i)].first - loc_xy[sz(j)].first;
      const double dy = zone_xy[sz(i)].second - loc_xy[sz(j)].second;
      inst.dist(sz(i), sz(j)) = std::round(std::hypot(dx, dy) * 1e4) / 1e4;
    }
  }

  // Tree skeleton: breadth-first ids so parents precede children.
  const int total = params.node_count();
  inst.tree.reserve(sz(total));
  ScenarioNode root;
  root.id = 0;
  root.parent = kInitialState;
  root.prob = 1.0;
  inst.tree.push_back(root);
  for (std::size_t cursor = 0; cursor < inst.tree.size(); ++cursor) {
    // Level of the cursor node = number of ancestors + 1.
    int level = 1;
    for (int a = inst.tree[cursor].parent; a != kInitialState; a = inst.tree[sz(a)].parent) ++level;
    if (level >= params.depth) continue;
    const int kids = params.branching;
    std::vector<double> weights(sz(kids));
    double wsum = 0.0;
    for (auto& w : weights) {
      w = kids == 1 ? 1.0 : draw(rng, {0.5, 1.5});
      wsum += w;
    }
    for (int c = 0; c < kids; ++c) {
      ScenarioNode child;
      child.id = static_cast<int>(inst.tree.size());
      child.parent = static_cast<int>(cursor);
      child.prob = inst.tree[cursor].prob * weights[sz(c)] / wsum;
      inst.tree.push_back(child);
    }
  }
  // Renormalise sibling masses exactly onto their parent.
  for (const auto& kids : inst.child_lists()) {
    if (kids.empty()) continue;
    const int parent = inst.tree[sz(kids.front())].parent;
    double acc = 0.0;
    for (std::size_t c = 0; c + 1 < kids.size(); ++c) acc += inst.tree[sz(kids[c])].prob;
    inst.tree[sz(kids.back())].prob = inst.tree[sz(parent)].prob - acc;
  }

  for (auto& node : inst.tree) {
    const bool is_root = node.parent == kInitialState;
    const ScenarioNode* parent = is_root ? nullptr : &inst.tree[sz(node.parent)];
    node.w.resize(sz(ni));
    node.bcoef.resize(sz(ni));
    node.theta.resize(sz(ni));
    node.radius.resize(sz(ni));
    for (int i = 0; i < ni; ++i) {
      node.w[sz(i)] = is_root ? draw(rng, params.demand) : parent->w[sz(i)] * draw(rng, params.growth);
      node.bcoef[sz(i)] = draw(rng, params.influence);
      node.theta[sz(i)] = draw(rng, params.coverage_target);
      double r = draw(rng, params.radius);
      double nearest = std::numeric_limits<double>::infinity();
      for (int j = 0; j < nj; ++j) nearest = std::min(nearest, inst.dist(sz(i), sz(j)));
      node.radius[sz(i)] = std::max(r, nearest);
    }
    auto costs = [&](std::vector<double>& out, Range base, const std::vector<double>* prev) {
      out.resize(sz(nj));
      for (int j = 0; j < nj; ++j) {
        out[sz(j)] = prev ? (*prev)[sz(j)] * draw(rng, params.cost_drift) : draw(rng, base);
        out[sz(j)] = std::round(out[sz(j)] * 100.0) / 100.0;
      }
    };
    costs(node.cost_build, params.cost_build, parent ? &parent->cost_build : nullptr);
    costs(node.cost_post, params.cost_post, parent ? &parent->cost_post : nullptr);
    costs(node.cost_op_station, params.cost_op_station, parent ? &parent->cost_op_station : nullptr);
    costs(node.cost_op_post, params.cost_op_post, parent ? &parent->cost_op_post : nullptr);
  }

  // Round demand data to short decimals, then shrink until a full build
  // absorbs it.
  auto round4 = [](double v) { return std::round(v * 1e4) / 1e4; };
  for (auto& node : inst.tree) {
    for (auto& v : node.w) v = round4(v);
    for (auto& v : node.bcoef) v = round4(v);
    for (auto& v : node.theta) v = round4(v);
    for (auto& v : node.radius) v = std::ceil(v * 1e4) / 1e4;
  }

  const auto cov = coverage_sets(inst);
  const auto rho = rho_table_for(inst);
  int attempts = 0;
  while (!all_open_absorbs_demand(inst, cov, rho)) {
    if (++attempts > 200) {
      throw ParameterError("generator could not make demand fit the maximum capacity");
    }
    for (auto& node : inst.tree) {
      for (auto& v : node.w) v = round4(v * 0.9);
      for (auto& v : node.bcoef) v = round4(v * 0.9);
    }
  }

  validate(inst);
  return inst;
}

}  // namespace evcap

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>

#include "evcap/errors.hpp"
#include "lp_engine.hpp"

namespace evcap::milp {

namespace {

constexpr double kIntTol = 1e-6;

std::size_t sz(int v) { return static_cast<std::size_t>(v); }

struct Fix {
  int var;
  double value;
};

struct Node {
  double bound;
  int depth;
  long seq;
  std::vector<Fix> fixes;
  std::shared_ptr<const detail::Basis> basis;
};

// Best bound first; ties go deeper, then to the newest node.
struct NodeAfter {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    if (a.depth != b.depth) return a.depth < b.depth;
    return a.seq < b.seq;
  }
};

double relative_gap(double objective, double bound) {
  if (!std::isfinite(objective)) return kInf;
  return std::max(0.0, objective - bound) / std::max(std::abs(objective), 1e-10);
}

}  // namespace

MipSolution solve_mip(const Model& model, const MipLimits& limits) {
  model.validate();
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };

  const auto& vars = model.variables();
  std::vector<int> binaries;
  for (int j = 0; j < model.num_variables(); ++j) {
    if (vars[sz(j)].kind == VarKind::Binary) binaries.push_back(j);
  }

  MipSolution out;
  auto accept = [&](std::vector<double> values) {
    for (int j : binaries) values[sz(j)] = std::round(values[sz(j)]);
    const double z = model.objective(values);
    if (z < out.objective) {
      out.objective = z;
      out.values = std::move(values);
    }
  };

  if (limits.incumbent_hint && limits.incumbent_hint->size() == vars.size()) {
    const auto& hint = *limits.incumbent_hint;
    const bool integral = std::all_of(binaries.begin(), binaries.end(), [&](int j) {
      return std::abs(hint[sz(j)] - std::round(hint[sz(j)])) <= kIntTol;
    });
    if (integral && model.max_violation(hint) <= 1e-6) accept(hint);
  }

  detail::LpEngine lp(model);
  std::vector<Node> open;
  open.push_back(Node{-kInf, 0, 0, {}, nullptr});
  long next_seq = 1;
  const detail::Basis* engine_state = nullptr;  // snapshot the engine currently holds
  bool hit_time = false;
  bool hit_nodes = false;

  auto prune_level = [&] {
    return out.objective - std::max(1e-9, limits.gap_tol * std::abs(out.objective));
  };

  while (!open.empty()) {
    if (elapsed() >= limits.time_limit_s) {
      hit_time = true;
      break;
    }
    if (out.nodes >= limits.node_limit) {
      hit_nodes = true;
      break;
    }
    std::pop_heap(open.begin(), open.end(), NodeAfter{});
    Node node = std::move(open.back());
    open.pop_back();
    if (out.has_incumbent() && node.bound >= prune_level()) continue;
    if (out.has_incumbent() && relative_gap(out.objective, node.bound) <= limits.gap_tol) {
      open.push_back(std::move(node));
      std::push_heap(open.begin(), open.end(), NodeAfter{});
      break;
    }

    for (int j : binaries) lp.set_bounds(j, vars[sz(j)].lower, vars[sz(j)].upper);
    for (const auto& f : node.fixes) lp.set_bounds(f.var, f.value, f.value);

    LpStatus status;
    if (!node.basis) {
      status = lp.solve();
    } else {
      if (engine_state != node.basis.get()) lp.load_basis(*node.basis);
      status = lp.resolve();
    }
    engine_state = nullptr;
    ++out.nodes;

    if (status == LpStatus::IterationLimit) {
      throw ConvergenceError("LP relaxation hit the simplex iteration limit");
    }
    if (status == LpStatus::Unbounded) {
      out.status = MipStatus::Unbounded;
      out.bound = -kInf;
      out.lp_iterations = lp.iterations();
      out.seconds = elapsed();
      return out;
    }
    if (status == LpStatus::Infeasible) continue;

    const double z = lp.objective();
    if (out.has_incumbent() && z >= prune_level()) continue;

    auto values = lp.values();
    int branch_var = -1;
    double best_frac = kIntTol;
    for (int j : binaries) {
      const double v = values[sz(j)];
      const double frac = std::min(v - std::floor(v), std::ceil(v) - v);
      if (frac > best_frac) {
        best_frac = frac;
        branch_var = j;
      }
    }
    if (branch_var < 0) {
      accept(std::move(values));
      continue;
    }

    auto snapshot = std::make_shared<const detail::Basis>(lp.basis());
    engine_state = snapshot.get();
    for (double value : {0.0, 1.0}) {
      Node child{z, node.depth + 1, next_seq++, node.fixes, snapshot};
      child.fixes.push_back(Fix{branch_var, value});
      open.push_back(std::move(child));
      std::push_heap(open.begin(), open.end(), NodeAfter{});
    }
  }

  double bound = out.objective;
  for (const auto& n : open) bound = std::min(bound, n.bound);

  out.lp_iterations = lp.iterations();
  out.seconds = elapsed();
  if (hit_time || (hit_nodes && !out.has_incumbent())) {
    out.status = MipStatus::TimeLimit;
  } else if (hit_nodes) {
    out.status = MipStatus::Feasible;
  } else if (out.has_incumbent()) {
    out.status = MipStatus::Optimal;
  } else {
    out.status = MipStatus::Infeasible;
  }
  if (out.status == MipStatus::Infeasible) {
    out.bound = kInf;
    out.gap = kInf;
  } else {
    out.bound = std::min(bound, out.objective);
    out.gap = relative_gap(out.objective, out.bound);
  }
  return out;
}

}  // namespace evcap::milp

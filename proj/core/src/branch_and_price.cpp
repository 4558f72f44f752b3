#include "evcap/bp.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>

#include "evcap/approx.hpp"
#include "evcap/errors.hpp"
#include "evcap/heuristic.hpp"

namespace evcap::bp {

namespace {

using Clock = std::chrono::steady_clock;

std::size_t sz(int v) { return static_cast<std::size_t>(v); }

constexpr double kActive = 1e-6;  // lambda above this is in use

double seconds_left(Clock::time_point deadline) {
  if (deadline == Clock::time_point::max()) return milp::kInf;
  return std::chrono::duration<double>(deadline - Clock::now()).count();
}

// Identity of a column for de-duplication.
std::string key_of(const Column& c) {
  std::string k = std::to_string(c.node) + ":";
  for (std::size_t j = 0; j < c.open.size(); ++j) k += std::to_string(c.open[j] ? c.posts[j] : 0) + ",";
  return k;
}

class Pool {
 public:
  explicit Pool(std::vector<Column>& cols) : cols_(cols) {
    for (const auto& c : cols_) keys_.insert(key_of(c));
  }
  // Appends unless present; returns the new index or -1.
  int add(const Column& c) {
    if (!keys_.insert(key_of(c)).second) return -1;
    cols_.push_back(c);
    return static_cast<int>(cols_.size()) - 1;
  }

 private:
  std::vector<Column>& cols_;
  std::set<std::string> keys_;
};

}  // namespace

CgResult column_generation(const Decomposition& dec, std::vector<Column>& pool,
                           const std::vector<Fixing>& fixings, const CgLimits& limits,
                           int branch_node) {
  const auto& inst = dec.instance();
  const int nn = inst.num_nodes();
  CgResult res;
  if (contradictory(inst, fixings)) {
    res.status = CgStatus::Infeasible;
    return res;
  }
  Pool keys(pool);
  Rmp rmp;
  milp::LpSolution lp;

  for (int it = 0;; ++it) {
    rmp = build_rmp(inst, pool, fixings);
    lp = milp::solve_lp(rmp.model);
    if (lp.status != milp::LpStatus::Optimal) {
      throw ConvergenceError("restricted master LP ended with status " + milp::to_string(lp.status));
    }
    res.lp_value = lp.objective;
    res.duals = extract_duals(inst, rmp, lp);

    CgRecord rec;
    rec.branch_node = branch_node;
    rec.iteration = it;
    rec.rmp_value = lp.objective;
    rec.reduced_costs.assign(sz(nn), 0.0);
    if (it >= limits.max_iterations || seconds_left(limits.deadline) <= 0.0) {
      res.status = CgStatus::TimeLimit;
      res.log.push_back(std::move(rec));
      break;
    }

    // Nodes in topological order; a child is first priced under its parent's
    // fresh column and priced exactly when that yields nothing new.
    std::vector<std::optional<Column>> fresh(sz(nn));
    bool exact_round = true;
    bool limited = false;
    double rc_sum = 0.0;
    for (int n = 0; n < nn; ++n) {
      milp::MipLimits ml;
      ml.gap_tol = 1e-9;
      const int parent = inst.tree[sz(n)].parent;
      const Column* guide = parent != kInitialState && fresh[sz(parent)] ? &*fresh[sz(parent)] : nullptr;
      PricingResult pr;
      bool exact = true;
      int added = -1;
      if (guide) {
        ml.time_limit_s = seconds_left(limits.deadline);
        pr = solve_pricing(dec, n, res.duals, guide, fixings, ml);
        ++res.pricing_calls;
        if (pr.status == PricingStatus::Found) added = keys.add(*pr.column);
        exact = false;
      }
      if (added < 0) {
        ml.time_limit_s = seconds_left(limits.deadline);
        pr = solve_pricing(dec, n, res.duals, nullptr, fixings, ml);
        ++res.pricing_calls;
        exact = true;
        if (pr.status == PricingStatus::Infeasible) {
          res.status = CgStatus::Infeasible;
          rec.reduced_costs[sz(n)] = milp::kInf;
          res.log.push_back(std::move(rec));
          return res;
        }
        if (pr.status == PricingStatus::Limit) limited = true;
        if (pr.status == PricingStatus::Found) added = keys.add(*pr.column);
      }
      rec.reduced_costs[sz(n)] = pr.reduced_cost;
      if (exact && std::isfinite(pr.rc_bound)) rc_sum += std::min(0.0, pr.rc_bound);
      else exact_round = false;
      if (added >= 0) {
        res.new_columns.push_back(added);
        fresh[sz(n)] = pool[sz(added)];
        ++rec.columns_added;
      }
    }
    if (exact_round) {
      rec.lagrangian_lb = lp.objective + rc_sum;
      res.lagrangian_lb = std::max(res.lagrangian_lb, *rec.lagrangian_lb);
    }
    const int added = rec.columns_added;
    res.log.push_back(std::move(rec));
    if (added == 0) {
      res.status = limited ? CgStatus::TimeLimit : CgStatus::Converged;
      break;
    }
  }

  res.lambda.assign(pool.size(), 0.0);
  for (std::size_t q = 0; q < rmp.column_var.size(); ++q) {
    if (rmp.column_var[q] >= 0) res.lambda[q] = lp.values[sz(rmp.column_var[q])];
  }
  if (res.status == CgStatus::Converged) {
    double penalty = 0.0;
    for (int v : rmp.artificial) penalty += lp.values[sz(v)];
    for (int v : rmp.slacks) penalty += lp.values[sz(v)];
    if (penalty > kActive) res.status = CgStatus::Infeasible;
  }
  return res;
}

std::optional<Deployment> primal_repair(const Instance& inst, const std::vector<Column>& pool,
                                        const std::vector<double>& lambda) {
  const auto nn = sz(inst.num_nodes());
  const auto nj = sz(inst.num_locations());
  Grid<double> xbar(nn, nj, 0.0);
  Grid<std::uint8_t> seed(nn, nj, 0);
  // The single active column of each node, when the point is integral.
  std::vector<int> chosen(nn, -1);
  bool integral = true;
  for (std::size_t q = 0; q < pool.size() && q < lambda.size(); ++q) {
    if (lambda[q] <= kActive) continue;
    const auto n = sz(pool[q].node);
    for (std::size_t j = 0; j < nj; ++j) xbar(n, j) += lambda[q] * pool[q].open[j];
    if (lambda[q] < 1.0 - kActive || chosen[n] >= 0) integral = false;
    chosen[n] = static_cast<int>(q);
  }
  for (std::size_t n = 0; n < nn; ++n) {
    for (std::size_t j = 0; j < nj; ++j) seed(n, j) = xbar(n, j) >= 0.5;
  }

  std::optional<Deployment> best;
  double best_z = milp::kInf;
  if (integral && std::all_of(chosen.begin(), chosen.end(), [](int q) { return q >= 0; })) {
    Deployment dep = Deployment::closed(inst);
    for (std::size_t n = 0; n < nn; ++n) {
      const auto& c = pool[sz(chosen[n])];
      for (std::size_t j = 0; j < nj; ++j) dep.set(static_cast<int>(n), static_cast<int>(j), c.open[j] ? c.posts[j] : 0);
    }
    if (check_feasible(inst, dep).feasible) {
      best_z = objective_value(inst, dep);
      best = std::move(dep);
    }
  }
  const Grid<std::uint8_t> none(nn, nj, 0);
  if (auto rep = heuristic::repair(inst, seed, none, heuristic::Criterion::MostZones)) {
    auto improved = heuristic::local_search(inst, *rep);
    const double z = objective_value(inst, improved);
    if (z < best_z - 1e-9) best = std::move(improved);
  }
  return best;
}

namespace {

struct OpenNode {
  std::vector<Fixing> fixings;
  double bound = -milp::kInf;
  int depth = 0;
  int id = 0;
};

struct Later {
  // Best bound first; ties go deeper, then to the newest node.
  bool operator()(const OpenNode& a, const OpenNode& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    if (a.depth != b.depth) return a.depth < b.depth;
    return a.id < b.id;
  }
};

// Branching restriction pair for a fractional master point, or nullopt when
// every node uses a single column.
std::optional<std::pair<Fixing, Fixing>> choose_branch(const Instance& inst, const std::vector<Column>& pool,
                                                       const std::vector<double>& lambda) {
  const auto nn = sz(inst.num_nodes());
  const auto nj = sz(inst.num_locations());
  Grid<double> xbar(nn, nj, 0.0);
  for (std::size_t q = 0; q < lambda.size(); ++q) {
    if (lambda[q] <= kActive) continue;
    for (std::size_t j = 0; j < nj; ++j) xbar(sz(pool[q].node), j) += lambda[q] * pool[q].open[j];
  }
  double best = 1.0;
  std::optional<std::pair<std::size_t, std::size_t>> pick;
  for (std::size_t n = 0; n < nn; ++n) {
    for (std::size_t j = 0; j < nj; ++j) {
      const double v = xbar(n, j);
      if (std::abs(v - std::round(v)) <= kActive) continue;
      const double d = std::abs(v - 0.5);
      if (d < best) {
        best = d;
        pick = {n, j};
      }
    }
  }
  if (pick) {
    const int n = static_cast<int>(pick->first);
    const int j = static_cast<int>(pick->second);
    return std::pair{Fixing{n, j, FixKind::Open, 0}, Fixing{n, j, FixKind::Open, 1}};
  }
  // Open flags agree; split on a post count the active columns disagree on.
  for (std::size_t n = 0; n < nn; ++n) {
    for (std::size_t j = 0; j < nj; ++j) {
      int lo = 1 << 30, hi = -1;
      double avg = 0.0, mass = 0.0;
      for (std::size_t q = 0; q < lambda.size(); ++q) {
        if (lambda[q] <= kActive || sz(pool[q].node) != n) continue;
        const int p = pool[q].posts[j];
        lo = std::min(lo, p);
        hi = std::max(hi, p);
        avg += lambda[q] * p;
        mass += lambda[q];
      }
      if (hi <= lo) continue;
      const int t = std::clamp(static_cast<int>(std::floor(avg / mass)), lo, hi - 1);
      const int in = static_cast<int>(n), jn = static_cast<int>(j);
      return std::pair{Fixing{in, jn, FixKind::PostsAtMost, t}, Fixing{in, jn, FixKind::PostsAtLeast, t + 1}};
    }
  }
  return std::nullopt;
}

}  // namespace

Result branch_and_price(const Instance& inst, const Limits& limits) {
  const auto start = Clock::now();
  const auto deadline = std::isfinite(limits.time_limit_s)
                            ? start + std::chrono::duration_cast<Clock::duration>(
                                          std::chrono::duration<double>(limits.time_limit_s))
                            : Clock::time_point::max();
  validate(inst);
  Decomposition dec(inst);
  std::vector<Column> pool;
  Result res;

  auto offer = [&](const Deployment& dep) {
    Pool keys(pool);
    for (const auto& c : columns_of(dec.coeffs(), dep)) keys.add(c);
    const double z = objective_value(inst, dep);
    if (z < res.z - 1e-9) {
      res.z = z;
      res.incumbent = dep;
    }
  };

  if (limits.warm_start) {
    try {
      offer(heuristic::best_greedy(inst));
    } catch (const InfeasibleError&) {
    }
    try {
      milp::MipLimits al;
      al.time_limit_s = 0.25 * limits.time_limit_s;
      offer(approx::approximate(inst, al).deployment);
    } catch (const InfeasibleError&) {
    } catch (const TimeLimitError&) {
    }
  }

  std::priority_queue<OpenNode, std::vector<OpenNode>, Later> open;
  open.push({{}, -milp::kInf, 0, 0});
  int next_id = 1;
  bool stopped = false;
  auto prune_level = [&] { return res.z - std::max(1e-9, limits.gap_tol * std::abs(res.z)); };

  while (!open.empty()) {
    if (open.top().bound >= prune_level()) {
      // Best-first: every remaining node is dominated.
      while (!open.empty()) {
        res.branch_log.push_back({open.top().id, open.top().depth, 0.0, open.top().bound, "pruned"});
        open.pop();
      }
      break;
    }
    if (Clock::now() >= deadline || res.stats.branch_nodes >= limits.node_limit) {
      stopped = true;
      break;
    }
    OpenNode node = open.top();
    open.pop();
    ++res.stats.branch_nodes;

    CgLimits cl;
    cl.deadline = deadline;
    auto cg = column_generation(dec, pool, node.fixings, cl, node.id);
    res.stats.cg_iterations += static_cast<long>(cg.log.size());
    res.stats.pricing_calls += cg.pricing_calls;
    res.cg_log.insert(res.cg_log.end(), cg.log.begin(), cg.log.end());
    BranchRecord rec{node.id, node.depth, cg.lp_value, node.bound, ""};

    if (cg.status == CgStatus::Infeasible) {
      rec.outcome = "infeasible";
      res.branch_log.push_back(rec);
      continue;
    }
    const double node_lb = std::max(node.bound, cg.lagrangian_lb);
    rec.bound = node_lb;
    if (node.id == 0) {
      res.stats.root_lp = cg.lp_value;
      res.stats.root_bound = node_lb;
    }
    if (auto dep = primal_repair(inst, pool, cg.lambda)) offer(*dep);

    if (cg.status == CgStatus::TimeLimit) {
      rec.outcome = "limit";
      res.branch_log.push_back(rec);
      node.bound = node_lb;
      open.push(node);
      stopped = true;
      break;
    }
    if (node_lb >= prune_level()) {
      rec.outcome = "pruned";
      res.branch_log.push_back(rec);
      continue;
    }
    auto branch = choose_branch(inst, pool, cg.lambda);
    if (!branch) {
      // A single column per node: primal_repair already offered this point.
      rec.outcome = "integral";
      res.branch_log.push_back(rec);
      continue;
    }
    if (limits.root_only) {
      rec.outcome = "root-only";
      res.branch_log.push_back(rec);
      node.bound = node_lb;
      open.push(node);
      stopped = true;
      break;
    }
    rec.outcome = "branched";
    res.branch_log.push_back(rec);
    for (const auto& fix : {branch->first, branch->second}) {
      OpenNode child{node.fixings, node_lb, node.depth + 1, next_id++};
      for (const auto& f : propagate(inst, fix)) child.fixings.push_back(f);
      if (contradictory(inst, child.fixings)) {
        res.branch_log.push_back({child.id, child.depth, 0.0, node_lb, "infeasible"});
        continue;
      }
      open.push(std::move(child));
    }
  }

  res.bound = res.z;
  while (!open.empty()) {
    res.bound = std::min(res.bound, open.top().bound);
    open.pop();
  }
  if (res.incumbent) {
    res.status = stopped ? milp::MipStatus::Feasible : milp::MipStatus::Optimal;
    res.bound = std::min(res.bound, res.z);
    res.gap = (res.z - res.bound) / std::max(std::abs(res.z), 1e-9);
  } else {
    res.status = stopped ? milp::MipStatus::TimeLimit : milp::MipStatus::Infeasible;
    if (!stopped) res.bound = milp::kInf;
  }
  res.stats.columns = static_cast<long>(pool.size());
  res.stats.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return res;
}

}  // namespace evcap::bp

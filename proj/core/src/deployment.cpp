#include "evcap/deployment.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "evcap/errors.hpp"

namespace evcap {

namespace {

std::size_t sz(int v) { return static_cast<std::size_t>(v); }

}  // namespace

Deployment Deployment::closed(const Instance& inst) {
  Deployment d;
  d.open = Grid<std::uint8_t>(sz(inst.num_nodes()), sz(inst.num_locations()), 0);
  d.posts = Grid<int>(sz(inst.num_nodes()), sz(inst.num_locations()), 0);
  return d;
}

void Deployment::set(int n, int j, int k) {
  open(sz(n), sz(j)) = k > 0 ? 1 : 0;
  posts(sz(n), sz(j)) = k;
}

queueing::RhoTable rho_table_for(const Instance& inst) {
  return queueing::RhoTable::build(inst.max_posts(), inst.queue.b, inst.queue.alpha);
}

std::vector<double> logit_probabilities(const Instance& inst, const CoverageSets& cov,
                                        std::span<const std::uint8_t> open_row, int n, int i) {
  std::vector<double> share(sz(inst.num_locations()), 0.0);
  double total = 0.0;
  for (int j : cov.locs_near[sz(n)][sz(i)]) {
    if (open_row[sz(j)]) {
      share[sz(j)] = attraction(inst, i, j);
      total += share[sz(j)];
    }
  }
  if (!(total > 0.0)) {
    throw CoverageError("zone " + std::to_string(i) + " is not covered by an open station at node " +
                        std::to_string(n));
  }
  for (double& s : share) s /= total;
  return share;
}

std::vector<double> demand_rates(const Instance& inst, const CoverageSets& cov,
                                 std::span<const std::uint8_t> open_row, int n) {
  const auto& node = inst.tree[sz(n)];
  std::vector<double> lambda(sz(inst.num_locations()), 0.0);
  for (int i = 0; i < inst.num_zones(); ++i) {
    const auto share = logit_probabilities(inst, cov, open_row, n, i);
    int open_near = 0;
    for (int k : cov.locs_near[sz(n)][sz(i)]) open_near += open_row[sz(k)] ? 1 : 0;
    const double per_share =
        node.theta[sz(i)] * (node.w[sz(i)] + node.bcoef[sz(i)] * open_near);
    for (int j : cov.locs_near[sz(n)][sz(i)]) lambda[sz(j)] += per_share * share[sz(j)];
  }
  return lambda;
}

double demand_rate(const Instance& inst, const CoverageSets& cov, const Deployment& dep,
                   int n, int j) {
  return demand_rates(inst, cov, dep.open.row(sz(n)), n)[sz(j)];
}

double objective_value(const Instance& inst, const Deployment& dep) {
  double total = 0.0;
  for (int n = 0; n < inst.num_nodes(); ++n) {
    const auto& node = inst.tree[sz(n)];
    double stage = 0.0;
    for (int j = 0; j < inst.num_locations(); ++j) {
      const auto& loc = inst.locations[sz(j)];
      const double x = dep.open(sz(n), sz(j));
      const double p = dep.posts(sz(n), sz(j));
      const double x_prev = node.parent == kInitialState ? (loc.x0 ? 1.0 : 0.0)
                                                         : dep.open(sz(node.parent), sz(j));
      const double p_prev = node.parent == kInitialState ? loc.y0
                                                         : dep.posts(sz(node.parent), sz(j));
      stage += node.cost_build[sz(j)] * (x - x_prev) + node.cost_post[sz(j)] * (p - p_prev) +
               node.cost_op_station[sz(j)] * x + node.cost_op_post[sz(j)] * p;
    }
    total += node.prob * stage;
  }
  return total;
}

std::string to_string(ConstraintFamily family) {
  switch (family) {
    case ConstraintFamily::Congestion: return "congestion";
    case ConstraintFamily::Coverage: return "coverage";
    case ConstraintFamily::ChoiceProbability: return "choice-probability";
    case ConstraintFamily::PostSelection: return "post-selection";
    case ConstraintFamily::StationPersistence: return "station-persistence";
    case ConstraintFamily::PostMonotonicity: return "post-monotonicity";
    case ConstraintFamily::Bounds: return "bounds";
  }
  return "unknown";
}

std::string Violation::describe() const {
  std::ostringstream os;
  os << to_string(family) << " violated at node " << node;
  if (!indices.empty()) {
    os << " (";
    for (std::size_t k = 0; k < indices.size(); ++k) os << (k ? "," : "") << indices[k];
    os << ")";
  }
  os << " by " << slack;
  return os.str();
}

FeasibilityReport check_feasible(const Instance& inst, const Deployment& dep) {
  return check_feasible(inst, coverage_sets(inst), rho_table_for(inst), dep);
}

FeasibilityReport check_feasible(const Instance& inst, const CoverageSets& cov,
                                 const queueing::RhoTable& rho, const Deployment& dep) {
  FeasibilityReport report;
  auto add = [&](ConstraintFamily f, int n, std::vector<int> idx, double slack) {
    report.violations.push_back(Violation{f, n, std::move(idx), slack});
  };

  const int nn = inst.num_nodes();
  const int nj = inst.num_locations();
  if (dep.open.rows() != sz(nn) || dep.open.cols() != sz(nj) || dep.posts.rows() != sz(nn) ||
      dep.posts.cols() != sz(nj)) {
    add(ConstraintFamily::Bounds, -1, {}, 1.0);
    report.feasible = false;
    return report;
  }

  for (int n = 0; n < nn; ++n) {
    const int parent = inst.tree[sz(n)].parent;
    for (int j = 0; j < nj; ++j) {
      const auto& loc = inst.locations[sz(j)];
      const int x = dep.open(sz(n), sz(j));
      const int p = dep.posts(sz(n), sz(j));
      if (x > 1 || p < 0 || p > loc.m_max) {
        add(ConstraintFamily::Bounds, n, {j}, p < 0 ? -p : std::max(0, p - loc.m_max));
      }
      if ((p >= 1) != (x == 1)) add(ConstraintFamily::PostSelection, n, {j}, std::abs(p - x));
      const int x_prev = parent == kInitialState ? (loc.x0 ? 1 : 0) : dep.open(sz(parent), sz(j));
      const int p_prev = parent == kInitialState ? loc.y0 : dep.posts(sz(parent), sz(j));
      if (x_prev > x) add(ConstraintFamily::StationPersistence, n, {j}, x_prev - x);
      if (p_prev > p) add(ConstraintFamily::PostMonotonicity, n, {j}, p_prev - p);
    }

    const auto open_row = dep.open.row(sz(n));
    bool covered = true;
    for (int i = 0; i < inst.num_zones(); ++i) {
      bool any = false;
      for (int k : cov.locs_near[sz(n)][sz(i)]) any = any || open_row[sz(k)] != 0;
      if (!any) {
        add(ConstraintFamily::Coverage, n, {i}, 1.0);
        covered = false;
      }
    }
    if (!covered) continue;

    for (int i = 0; i < inst.num_zones(); ++i) {
      const auto share = logit_probabilities(inst, cov, open_row, n, i);
      double sum = 0.0;
      for (double s : share) sum += s;
      if (std::abs(sum - 1.0) > 1e-9) add(ConstraintFamily::ChoiceProbability, n, {i}, std::abs(sum - 1.0));
    }

    const auto lambda = demand_rates(inst, cov, open_row, n);
    for (int j = 0; j < nj; ++j) {
      const int p = dep.posts(sz(n), sz(j));
      const double capacity = (p >= 1 && p <= rho.max_posts()) ? inst.queue.mu * rho[p] : 0.0;
      const double excess = lambda[sz(j)] - capacity;
      if (excess > kCapacityTol * std::max(1.0, lambda[sz(j)])) {
        add(ConstraintFamily::Congestion, n, {j}, excess);
      }
    }
  }
  report.feasible = report.violations.empty();
  return report;
}

}  // namespace evcap

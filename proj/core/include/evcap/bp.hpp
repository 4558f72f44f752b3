#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "evcap/deployment.hpp"
#include "evcap/grid.hpp"
#include "evcap/instance.hpp"
#include "evcap/milp.hpp"
#include "evcap/queueing.hpp"

namespace evcap::bp {

/// Per-node cost coefficients of the decomposition. Summing the column cost
/// of one column per node and subtracting psi gives objective_value of the
/// assembled deployment.
struct CostCoeffs {
  Grid<double> c1;  // per (node, location), multiplies the open flag
  Grid<double> c2;  // per (node, location), multiplies the post count
  double psi = 0.0;
};

CostCoeffs cost_coefficients(const Instance& inst);

/// In-scenario feasible point of one node.
struct Column {
  int node = 0;
  std::vector<std::uint8_t> open;
  std::vector<int> posts;
  double cost = 0.0;

  friend bool operator==(const Column&, const Column&) = default;
};

Column make_column(const CostCoeffs& coeffs, int node, std::vector<std::uint8_t> open,
                   std::vector<int> posts);

/// One column per node, read off a deployment.
std::vector<Column> columns_of(const CostCoeffs& coeffs, const Deployment& dep);

/// Branching restriction on node `node`, location `loc`.
enum class FixKind {
  Open,         // open flag equals value (0 or 1)
  PostsAtMost,  // post count <= value
  PostsAtLeast  // post count >= value
};

struct Fixing {
  int node = 0;
  int loc = 0;
  FixKind kind = FixKind::Open;
  int value = 0;

  friend bool operator==(const Fixing&, const Fixing&) = default;
};

/// The fixing plus every fixing it implies through station persistence and
/// post monotonicity: opening and post floors pass to descendants, closing
/// and post ceilings pass to ancestors.
std::vector<Fixing> propagate(const Instance& inst, const Fixing& fix);

/// Whether a point of `node` respects every fixing on that node.
bool satisfies(const Column& col, const std::vector<Fixing>& fixings);

/// True when some (node, location) is restricted in contradictory ways.
bool contradictory(const Instance& inst, const std::vector<Fixing>& fixings);

/// Duals of the restricted master. pi1 / pi2 belong to the open-flag and
/// post-count linking rows of each (node, location), sigma to the
/// convexity row of each node.
struct RmpDuals {
  Grid<double> pi1;
  Grid<double> pi2;
  std::vector<double> sigma;
};

/// Penalty on linking-row slacks and on the per-node artificial column.
inline constexpr double kBigM = 1e7;

/// Restricted master LP. Columns violating a fixing are left out; every node
/// also gets an artificial column of cost kBigM and every linking row a
/// penalised slack, so the LP is always feasible.
struct Rmp {
  milp::Model model;
  std::vector<int> column_var;  // per pool column, -1 when excluded
  std::vector<int> artificial;  // per node
  std::vector<int> slacks;
  Grid<int> open_row;   // per (node, location)
  Grid<int> posts_row;  // per (node, location)
  std::vector<int> convexity_row;
};

Rmp build_rmp(const Instance& inst, const std::vector<Column>& pool,
              const std::vector<Fixing>& fixings);

RmpDuals extract_duals(const Instance& inst, const Rmp& rmp, const milp::LpSolution& sol);

/// Coverage sets, rho table and cost coefficients shared by every pricing
/// call, plus one prebuilt pricing model per node.
class Decomposition {
 public:
  explicit Decomposition(const Instance& inst);

  const Instance& instance() const noexcept { return *inst_; }
  const CoverageSets& coverage() const noexcept { return cov_; }
  const queueing::RhoTable& rho() const noexcept { return rho_; }
  const CostCoeffs& coeffs() const noexcept { return coeffs_; }
  const std::vector<int>& children(int n) const { return children_[static_cast<std::size_t>(n)]; }

  struct PricingBlock {
    milp::Model model;  // in-scenario rows, plus the initial state at the root
    std::vector<int> x;
    std::vector<std::vector<int>> y;
  };
  const PricingBlock& block(int n) const { return blocks_[static_cast<std::size_t>(n)]; }

 private:
  const Instance* inst_;
  CoverageSets cov_;
  queueing::RhoTable rho_;
  CostCoeffs coeffs_;
  std::vector<std::vector<int>> children_;
  std::vector<PricingBlock> blocks_;
};

enum class PricingStatus {
  Found,       // column with negative reduced cost
  None,        // proven: no column prices out
  Infeasible,  // no in-scenario point satisfies the restrictions
  Limit        // limit reached before a negative column was found
};

std::string to_string(PricingStatus s);

struct PricingResult {
  PricingStatus status = PricingStatus::None;
  std::optional<Column> column;
  double reduced_cost = 0.0;  // of the best point found
  double rc_bound = 0.0;      // proven lower bound on any reduced cost
};

/// Solves the pricing problem of node n. With `guidance` (the parent's newest
/// column) the point must keep every station of that column open with at
/// least as many posts.
PricingResult solve_pricing(const Decomposition& dec, int n, const RmpDuals& duals,
                            const Column* guidance, const std::vector<Fixing>& fixings,
                            const milp::MipLimits& limits = {});

/// One column-generation iteration.
struct CgRecord {
  int branch_node = 0;
  int iteration = 0;
  double rmp_value = 0.0;
  std::optional<double> lagrangian_lb;  // only when every node was priced exactly
  int columns_added = 0;
  std::vector<double> reduced_costs;  // best reduced cost per node
};

enum class CgStatus { Converged, Infeasible, TimeLimit };

struct CgResult {
  CgStatus status = CgStatus::Converged;
  double lp_value = 0.0;
  double lagrangian_lb = -milp::kInf;  // best valid bound over exact rounds
  RmpDuals duals;
  std::vector<double> lambda;  // per pool column, 0 when excluded
  std::vector<int> new_columns;  // pool indices appended by this call
  std::vector<CgRecord> log;
  long pricing_calls = 0;
};

struct CgLimits {
  std::chrono::steady_clock::time_point deadline = std::chrono::steady_clock::time_point::max();
  int max_iterations = 100000;
};

/// Column generation at one branch node. New columns are appended to `pool`.
CgResult column_generation(const Decomposition& dec, std::vector<Column>& pool,
                           const std::vector<Fixing>& fixings, const CgLimits& limits = {},
                           int branch_node = 0);

/// Rounds the aggregated open flags of an RMP point (>= 0.5 opens), repairs
/// coverage and capacity greedily and improves with local search.
std::optional<Deployment> primal_repair(const Instance& inst, const std::vector<Column>& pool,
                                        const std::vector<double>& lambda);

struct Limits {
  double time_limit_s = milp::kInf;
  double gap_tol = 1e-6;
  bool root_only = false;
  long node_limit = 100000;
  bool warm_start = true;  // seed the pool with greedy and approximation columns
};

struct BranchRecord {
  int id = 0;
  int depth = 0;
  double lp_value = 0.0;
  double bound = 0.0;
  std::string outcome;  // pruned, infeasible, integral, branched, limit
};

struct Stats {
  long branch_nodes = 0;
  long cg_iterations = 0;
  long columns = 0;
  long pricing_calls = 0;
  double root_lp = 0.0;
  double root_bound = 0.0;
  double seconds = 0.0;
};

struct Result {
  milp::MipStatus status = milp::MipStatus::Infeasible;
  std::optional<Deployment> incumbent;
  double z = milp::kInf;
  double bound = -milp::kInf;
  double gap = milp::kInf;
  Stats stats;
  std::vector<CgRecord> cg_log;
  std::vector<BranchRecord> branch_log;
};

/// Best-first branch-and-price seeded with greedy and approximation columns.
Result branch_and_price(const Instance& inst, const Limits& limits = {});

}  // namespace evcap::bp

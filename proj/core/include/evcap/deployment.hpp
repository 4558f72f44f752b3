#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "evcap/grid.hpp"
#include "evcap/instance.hpp"
#include "evcap/queueing.hpp"

namespace evcap {

/// Station-open flags and post counts per (node, location). A location is
/// open exactly when it holds at least one post.
struct Deployment {
  Grid<std::uint8_t> open;  // nodes x locations
  Grid<int> posts;          // nodes x locations

  /// All-closed deployment sized for `inst`.
  static Deployment closed(const Instance& inst);

  int num_nodes() const noexcept { return static_cast<int>(open.rows()); }
  int num_locations() const noexcept { return static_cast<int>(open.cols()); }

  /// Opens (n, j) with k posts, or closes it when k == 0.
  void set(int n, int j, int k);

  friend bool operator==(const Deployment&, const Deployment&) = default;
};

/// Rho table sized for the instance's largest location, using its queue
/// configuration.
queueing::RhoTable rho_table_for(const Instance& inst);

/// Probabilities that drivers of zone i choose each location at node n under
/// the logit model, given the open flags of that node. Zero for closed and
/// out-of-radius locations. Throws CoverageError if nothing covers i.
std::vector<double> logit_probabilities(const Instance& inst, const CoverageSets& cov,
                                        std::span<const std::uint8_t> open_row, int n, int i);

/// Arrival rate at every location of node n for the given open flags.
/// Throws CoverageError if some zone is uncovered.
std::vector<double> demand_rates(const Instance& inst, const CoverageSets& cov,
                                 std::span<const std::uint8_t> open_row, int n);

/// Arrival rate at location j of node n.
double demand_rate(const Instance& inst, const CoverageSets& cov, const Deployment& dep,
                   int n, int j);

/// Expected total cost of building and operating the deployment, with the
/// initial state (x0, y0) standing in for the root's parent.
double objective_value(const Instance& inst, const Deployment& dep);

enum class ConstraintFamily {
  Congestion,         // arrival rate within the service-level capacity
  Coverage,           // every zone reaches an open station
  ChoiceProbability,  // logit shares of each zone sum to one
  PostSelection,      // posts >= 1 exactly when the station is open
  StationPersistence, // stations never close along a tree path
  PostMonotonicity,   // post counts never decrease along a tree path
  Bounds,             // shapes and ranges of the decision values
};

std::string to_string(ConstraintFamily family);

struct Violation {
  ConstraintFamily family;
  int node = -1;
  std::vector<int> indices;  // zone and/or location ids, family dependent
  double slack = 0.0;        // amount by which the constraint is violated
  std::string describe() const;
};

struct FeasibilityReport {
  bool feasible = true;
  std::vector<Violation> violations;
};

/// Re-evaluates every constraint of the model on a decoded deployment, with
/// choice probabilities computed from the closed-form logit shares.
FeasibilityReport check_feasible(const Instance& inst, const Deployment& dep);
FeasibilityReport check_feasible(const Instance& inst, const CoverageSets& cov,
                                 const queueing::RhoTable& rho, const Deployment& dep);

/// Absolute-plus-relative slack allowed on the congestion rows.
inline constexpr double kCapacityTol = 1e-6;

}  // namespace evcap

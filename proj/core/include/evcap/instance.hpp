#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "evcap/grid.hpp"
#include "evcap/queueing.hpp"

namespace evcap {

/// Parent id of the root node: the virtual initial state carrying x0 / y0.
inline constexpr int kInitialState = -1;

struct Zone {
  int id = 0;
  double a = 1.0;  // distance-decay coefficient of the logit attraction

  friend bool operator==(const Zone&, const Zone&) = default;
};

struct Location {
  int id = 0;
  int m_max = 1;     // maximum number of charging posts
  bool x0 = false;   // station present before the planning horizon
  int y0 = 0;        // posts present before the planning horizon

  friend bool operator==(const Location&, const Location&) = default;
};

/// One node of the scenario tree. Probabilities are unconditional: the
/// children of a node split its probability mass, and the root has mass 1.
/// Per-zone vectors have one entry per zone, per-location vectors one entry
/// per candidate location.
struct ScenarioNode {
  int id = 0;
  int parent = kInitialState;
  double prob = 1.0;

  std::vector<double> w;       // base charging demand rate
  std::vector<double> bcoef;   // influence of nearby facilities on demand
  std::vector<double> theta;   // coverage target in [0, 1]
  std::vector<double> radius;  // coverage radius

  std::vector<double> cost_build;       // new station
  std::vector<double> cost_post;        // additional charging post
  std::vector<double> cost_op_station;  // operating an open station
  std::vector<double> cost_op_post;     // operating one post

  friend bool operator==(const ScenarioNode&, const ScenarioNode&) = default;
};

struct Instance {
  std::vector<Zone> zones;
  std::vector<Location> locations;
  Grid<double> dist;  // zones x locations
  std::vector<ScenarioNode> tree;  // topologically ordered, root first
  queueing::QueueConfig queue;

  std::optional<std::uint64_t> seed;  // generator provenance, not model data

  int num_zones() const noexcept { return static_cast<int>(zones.size()); }
  int num_locations() const noexcept { return static_cast<int>(locations.size()); }
  int num_nodes() const noexcept { return static_cast<int>(tree.size()); }

  /// Largest m_max over all locations.
  int max_posts() const;

  /// Direct successors of node n, in increasing id order.
  std::vector<int> children(int n) const;

  /// Children lists for every node.
  std::vector<std::vector<int>> child_lists() const;

  friend bool operator==(const Instance&, const Instance&) = default;
};

/// Membership of zones and locations within the per-node coverage radii:
/// i is near j at node n iff dist(i, j) <= radius_n(i) (boundary inclusive).
struct CoverageSets {
  // zones_near[n][j] : zones within reach of location j at node n
  std::vector<std::vector<std::vector<int>>> zones_near;
  // locs_near[n][i]  : locations within reach of zone i at node n
  std::vector<std::vector<std::vector<int>>> locs_near;

  bool covers(int n, int i, int j) const;
};

CoverageSets coverage_sets(const Instance& inst);

/// Logit attraction exp(-a_i * d_ij).
double attraction(const Instance& inst, int i, int j);

/// Every violated invariant as a readable message; empty when valid.
std::vector<std::string> validation_problems(const Instance& inst);

/// Throws ValidationError listing every violated invariant.
void validate(const Instance& inst);

}  // namespace evcap

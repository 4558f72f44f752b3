#pragma once

#include <cstdint>
#include <string_view>

#include "evcap/instance.hpp"

namespace evcap {

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

/// Parameters of the random instance generator. Zones and candidate
/// locations are uniform points in a square; the scenario tree is uniform
/// with `branching` children per inner node and `depth` levels.
struct GeneratorParams {
  int n_zones = 4;
  int n_locations = 5;
  int depth = 2;
  int branching = 2;
  int m_max = 3;
  int initial_stations = 0;

  double side = 10.0;
  Range decay{0.2, 0.6};
  Range demand{0.3, 1.2};        // root-node base demand per zone
  Range growth{1.0, 1.35};       // per-stage demand multiplier
  Range influence{0.0, 0.15};    // bcoef
  Range coverage_target{0.8, 1.0};
  Range radius{3.0, 5.5};
  Range cost_build{800.0, 1200.0};
  Range cost_post{150.0, 250.0};
  Range cost_op_station{60.0, 100.0};
  Range cost_op_post{20.0, 40.0};
  Range cost_drift{0.9, 1.1};    // child cost = parent cost * drift

  queueing::QueueConfig queue{1.0, 0.9, 0};

  /// Number of scenario nodes implied by depth and branching.
  int node_count() const;

  /// Throws ParameterError on counts below one or inconsistent ranges.
  void validate() const;
};

enum class Preset { Tiny, Small, Medium };

/// Preset sizes: Tiny (4 zones, 5 locations, 3 nodes), Small (10, 15, 8) and
/// Medium (10, 25, 16). `m_max` applies to every location.
GeneratorParams preset_params(Preset preset, int m_max);

/// Parses "tiny" / "small" / "medium".
Preset parse_preset(std::string_view name);

/// Deterministic for fixed (params, seed). Radii are enlarged so every zone is
/// covered at every node, and demand is scaled down until opening every
/// location at full size absorbs it, so the result always admits a feasible
/// deployment.
Instance generate(const GeneratorParams& params, std::uint64_t seed);

}  // namespace evcap

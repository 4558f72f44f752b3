#pragma once

#include <cstdint>
#include <optional>

#include "evcap/deployment.hpp"
#include "evcap/instance.hpp"
#include "evcap/milp.hpp"

namespace evcap::test_support {

/// Seeded instance within the oracle-checkable size: 5 zones, 6 locations,
/// a root with two children and up to 4 posts per location.
Instance tiny_instance(std::uint64_t seed, int b = 0, int m_max = 4);

/// Single-node instance with one zone per entry of `dist_row_per_zone`
/// (distances to each location), unit decay, radius 10, the given demand and
/// unit costs everywhere unless overridden by the caller.
Instance hand_instance(const std::vector<std::vector<double>>& dist, double w, double bcoef,
                       int m_max, double mu = 4.0);

/// Extends a single-node instance into a chain of `length` nodes that all
/// copy the root's data (probabilities stay 1 along the chain).
Instance as_chain(const Instance& inst, int length);

struct Optimum {
  milp::MipStatus status;
  double z;
  Deployment dep;
};

/// EVCEC solved by the embedded MIP kernel with a tight gap.
Optimum mip_optimum(const Instance& inst);

/// Exhaustive search over every deployment (posts 0..M per node and
/// location), keeping feasible ones. Only for very small instances.
std::optional<Optimum> brute_force(const Instance& inst);

/// Random deployment satisfying persistence and post monotonicity; not
/// necessarily coverage- or capacity-feasible.
Deployment random_monotone_deployment(const Instance& inst, std::uint64_t seed);

}  // namespace evcap::test_support

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "evcap/deployment.hpp"
#include "evcap/grid.hpp"
#include "evcap/instance.hpp"
#include "evcap/queueing.hpp"

namespace evcap::heuristic {

/// Station-opening rule of the greedy heuristic.
enum class Criterion { MostZones, LowestCost, LowestCostPerZone };

std::string to_string(Criterion c);
Criterion parse_criterion(std::string_view name);

/// Smallest k in [max(1, floor_k), m_max] with mu * rho[k] >= lambda, or
/// nullopt when even m_max posts cannot absorb lambda.
std::optional<int> min_posts(double lambda, double mu, const queueing::RhoTable& rho, int m_max,
                             int floor_k);

/// Builds a deployment node by node in topological order. Every node starts
/// from its parent's deployment (the initial state at the root) plus the
/// `seed` flags; `banned` locations are never opened at that node. Coverage
/// gaps and overloaded stations are fixed by opening stations chosen with
/// `criterion`, and posts are sized with min_posts against the parent's count.
/// Returns nullopt when some node cannot be repaired.
std::optional<Deployment> repair(const Instance& inst, const Grid<std::uint8_t>& seed,
                                 const Grid<std::uint8_t>& banned, Criterion criterion);

/// Greedy construction from the initial state. Throws InfeasibleError when
/// even opening every allowed location cannot absorb demand.
Deployment greedy(const Instance& inst, Criterion criterion);

/// Cheapest greedy deployment over the three criteria (ties: enum order).
Deployment best_greedy(const Instance& inst);

/// First-improvement closing moves: close one location everywhere, repair
/// with MostZones, keep the result when strictly cheaper. Locations present
/// in the initial state are never closed. `start` must be feasible.
Deployment local_search(const Instance& inst, const Deployment& start);

}  // namespace evcap::heuristic

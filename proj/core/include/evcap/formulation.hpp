#pragma once

#include <span>
#include <vector>

#include "evcap/deployment.hpp"
#include "evcap/instance.hpp"
#include "evcap/milp.hpp"
#include "evcap/queueing.hpp"

namespace evcap {

/// Variable ids of one scenario node's block.
struct NodeVars {
  std::vector<int> x;                   // per location
  std::vector<std::vector<int>> y;      // per location, entry k-1 for k posts
  std::vector<std::vector<int>> alpha;  // per zone, aligned with locs_near[n][i]
  std::vector<std::vector<int>> z;      // per zone, |J_ni| x |J_ni| row-major (j, k)
};

/// Variable ids of a formulation, one block per scenario node.
struct VarIndex {
  std::vector<NodeVars> nodes;
};

struct EvcecModel {
  milp::Model model;
  VarIndex index;
};

/// Adds node n's in-scenario variables and rows: congestion, coverage, logit
/// linearisation and post selection. Post indicators are binary when
/// `integral_posts`, otherwise continuous in [0, 1].
NodeVars add_scenario_block(milp::Model& model, const Instance& inst, const CoverageSets& cov,
                            const queueing::RhoTable& rho, int n, bool integral_posts);

/// Full multistage model with the initial state as constants.
EvcecModel build_evcec(const Instance& inst);

/// Same model with post indicators relaxed to [0, 1]; station flags stay binary.
EvcecModel build_revcec(const Instance& inst);

/// Reads open flags and post counts (sum of k * y rounded) from a point.
Deployment decode(const Instance& inst, const VarIndex& index, std::span<const double> values);

/// Full variable vector of a deployment, with choice probabilities and
/// products from their closed forms. Closed (n, j) pairs get zero alpha.
std::vector<double> encode(const Instance& inst, const CoverageSets& cov, const VarIndex& index,
                           const Deployment& dep, int num_variables);

/// Relaxed post indicator values of (n, j), entry k-1 for k posts.
std::vector<double> post_weights(const VarIndex& index, std::span<const double> values, int n, int j);

}  // namespace evcap

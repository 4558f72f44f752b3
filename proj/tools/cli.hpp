#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "evcap/deployment.hpp"
#include "evcap/instance.hpp"
#include "evcap/milp.hpp"

namespace evcap::cli {

/// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kUsage = 1,       // bad flags, unreadable input, internal errors
  kInfeasible = 2,  // proven infeasible
  kTimeout = 3      // limit reached without a feasible point
};

struct SolveOptions {
  double time_limit_s = 7200.0;
  double gap_tol = 1e-6;
  bool root_only = false;
  std::optional<std::string> criterion;  // heuristic only; best of three when unset
};

/// Result of one algorithm on one instance.
struct Outcome {
  std::string algo;
  milp::MipStatus status = milp::MipStatus::Infeasible;
  std::optional<Deployment> deployment;
  double z = milp::kInf;
  double lb = milp::kInf;   // proven lower bound, NaN when the algorithm has none
  double gap = milp::kInf;  // own optimality gap (mip, bp) or (z - lb) / z (approx)
  double seconds = 0.0;
};

/// Runs "mip", "approx", "heuristic" or "bp". Throws ParameterError on an
/// unknown name; infeasibility and limits are reported through `status`.
Outcome run_algorithm(const Instance& inst, const std::string& algo, const SolveOptions& opts);

/// Worker count from EVCEC_THREADS (at least 1; 1 when unset or invalid).
int worker_count();

/// Entry point of the evcap tool; args exclude the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace evcap::cli

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "evcap/deployment.hpp"
#include "evcap/instance.hpp"

namespace evcap {

/// Solution document: the deployment plus where it came from.
struct SolutionFile {
  std::string algorithm;
  std::optional<std::uint64_t> seed;
  std::string instance_hash;
  double objective = 0.0;
  std::string status;
  Deployment deployment;
};

/// JSON rendering with `open` and `posts` objects keyed by node id.
std::string solution_to_json(const SolutionFile& sol);

/// Throws ParseError on malformed documents or inconsistent shapes.
SolutionFile solution_from_json(std::string_view text);

void save_solution(const SolutionFile& sol, const std::filesystem::path& path);
SolutionFile load_solution(const std::filesystem::path& path);

}  // namespace evcap

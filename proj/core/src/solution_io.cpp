#include "evcap/solution_io.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "evcap/errors.hpp"

namespace evcap {

namespace {
using json = nlohmann::ordered_json;
}

std::string solution_to_json(const SolutionFile& sol) {
  json doc;
  doc["algorithm"] = sol.algorithm;
  doc["seed"] = sol.seed ? json(*sol.seed) : json(nullptr);
  doc["instance_hash"] = sol.instance_hash;
  doc["status"] = sol.status;
  doc["objective"] = sol.objective;
  json open = json::object();
  json posts = json::object();
  const auto& dep = sol.deployment;
  for (int n = 0; n < dep.num_nodes(); ++n) {
    json o = json::array();
    json p = json::array();
    for (int j = 0; j < dep.num_locations(); ++j) {
      o.push_back(dep.open(static_cast<std::size_t>(n), static_cast<std::size_t>(j)) ? 1 : 0);
      p.push_back(dep.posts(static_cast<std::size_t>(n), static_cast<std::size_t>(j)));
    }
    open[std::to_string(n)] = std::move(o);
    posts[std::to_string(n)] = std::move(p);
  }
  doc["open"] = std::move(open);
  doc["posts"] = std::move(posts);
  return doc.dump(2) + "\n";
}

SolutionFile solution_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("solution syntax error: ") + e.what());
  }
  try {
    SolutionFile sol;
    sol.algorithm = doc.at("algorithm").get<std::string>();
    if (!doc.at("seed").is_null()) sol.seed = doc.at("seed").get<std::uint64_t>();
    sol.instance_hash = doc.at("instance_hash").get<std::string>();
    sol.status = doc.value("status", std::string{});
    sol.objective = doc.at("objective").get<double>();
    const auto& open = doc.at("open");
    const auto& posts = doc.at("posts");
    const auto nodes = open.size();
    if (posts.size() != nodes) throw ParseError("open and posts list different nodes", 0, "posts");
    std::size_t cols = 0;
    if (nodes > 0) cols = open.at("0").size();
    Deployment dep{Grid<std::uint8_t>(nodes, cols, 0), Grid<int>(nodes, cols, 0)};
    for (std::size_t n = 0; n < nodes; ++n) {
      const auto key = std::to_string(n);
      const auto& o = open.at(key);
      const auto& p = posts.at(key);
      if (o.size() != cols || p.size() != cols) throw ParseError("ragged deployment row", 0, "open." + key);
      for (std::size_t j = 0; j < cols; ++j) {
        dep.open(n, j) = o[j].get<int>() != 0;
        dep.posts(n, j) = p[j].get<int>();
      }
    }
    sol.deployment = std::move(dep);
    return sol;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed solution: ") + e.what());
  }
}

void save_solution(const SolutionFile& sol, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write solution file " + path.string());
  out << solution_to_json(sol);
  if (!out) throw Error("failed writing solution file " + path.string());
}

SolutionFile load_solution(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open solution file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return solution_from_json(buf.str());
}

}  // namespace evcap

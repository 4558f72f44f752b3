#include "evcap/instance.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "evcap/errors.hpp"

namespace evcap {

namespace {

std::string join(const std::vector<std::string>& parts, const char* sep) {
  std::ostringstream os;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) os << sep;
    os << parts[i];
  }
  return os.str();
}

template <typename Pred>
void check_vector(std::vector<std::string>& out, const ScenarioNode& node,
                  const std::vector<double>& v, std::size_t expected, const char* name,
                  Pred ok, const char* requirement) {
  if (v.size() != expected) {
    out.push_back("tree[" + std::to_string(node.id) + "]." + name + ": expected " +
                  std::to_string(expected) + " entries, got " + std::to_string(v.size()));
    return;
  }
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (!ok(v[k])) {
      out.push_back("tree[" + std::to_string(node.id) + "]." + name + "[" +
                    std::to_string(k) + "] must be " + requirement);
    }
  }
}

}  // namespace

ValidationError::ValidationError(std::vector<std::string> problems)
    : Error("invalid instance: " + join(problems, "; ")), problems_(std::move(problems)) {}

int Instance::max_posts() const {
  int m = 0;
  for (const auto& loc : locations) m = std::max(m, loc.m_max);
  return m;
}

std::vector<int> Instance::children(int n) const {
  std::vector<int> out;
  for (const auto& node : tree) {
    if (node.parent == n) out.push_back(node.id);
  }
  return out;
}

std::vector<std::vector<int>> Instance::child_lists() const {
  std::vector<std::vector<int>> out(tree.size());
  for (const auto& node : tree) {
    if (node.parent >= 0 && node.parent < num_nodes()) {
      out[static_cast<std::size_t>(node.parent)].push_back(node.id);
    }
  }
  return out;
}

bool CoverageSets::covers(int n, int i, int j) const {
  const auto& locs = locs_near[static_cast<std::size_t>(n)][static_cast<std::size_t>(i)];
  return std::binary_search(locs.begin(), locs.end(), j);
}

CoverageSets coverage_sets(const Instance& inst) {
  const auto nn = static_cast<std::size_t>(inst.num_nodes());
  const auto ni = static_cast<std::size_t>(inst.num_zones());
  const auto nj = static_cast<std::size_t>(inst.num_locations());
  CoverageSets cov;
  cov.zones_near.assign(nn, std::vector<std::vector<int>>(nj));
  cov.locs_near.assign(nn, std::vector<std::vector<int>>(ni));
  for (std::size_t n = 0; n < nn; ++n) {
    const auto& radius = inst.tree[n].radius;
    for (std::size_t i = 0; i < ni; ++i) {
      for (std::size_t j = 0; j < nj; ++j) {
        if (inst.dist(i, j) <= radius[i]) {
          cov.zones_near[n][j].push_back(static_cast<int>(i));
          cov.locs_near[n][i].push_back(static_cast<int>(j));
        }
      }
    }
  }
  return cov;
}

double attraction(const Instance& inst, int i, int j) {
  return std::exp(-inst.zones[static_cast<std::size_t>(i)].a *
                  inst.dist(static_cast<std::size_t>(i), static_cast<std::size_t>(j)));
}

std::vector<std::string> validation_problems(const Instance& inst) {
  std::vector<std::string> out;
  const auto ni = inst.zones.size();
  const auto nj = inst.locations.size();

  if (inst.zones.empty()) out.push_back("zones: at least one zone required");
  if (inst.locations.empty()) out.push_back("locations: at least one location required");
  if (inst.tree.empty()) out.push_back("tree: at least one node required");

  for (std::size_t i = 0; i < ni; ++i) {
    const auto& z = inst.zones[i];
    if (z.id != static_cast<int>(i)) out.push_back("zones[" + std::to_string(i) + "].id must equal its position");
    if (!(z.a > 0.0)) out.push_back("zones[" + std::to_string(i) + "].a must be positive");
  }
  for (std::size_t j = 0; j < nj; ++j) {
    const auto& l = inst.locations[j];
    const std::string tag = "locations[" + std::to_string(j) + "]";
    if (l.id != static_cast<int>(j)) out.push_back(tag + ".id must equal its position");
    if (l.m_max < 1 || l.m_max > queueing::kMaxServers) {
      out.push_back(tag + ".m_max must lie in [1, " + std::to_string(queueing::kMaxServers) + "]");
    }
    if (l.y0 < 0 || l.y0 > l.m_max) out.push_back(tag + ".y0 must lie in [0, m_max]");
    if (l.y0 > 0 && !l.x0) out.push_back(tag + ": y0 > 0 requires x0 = true");
  }

  if (inst.dist.rows() != ni || inst.dist.cols() != nj) {
    out.push_back("dist: expected a " + std::to_string(ni) + " x " + std::to_string(nj) + " matrix");
  } else {
    for (std::size_t i = 0; i < ni; ++i) {
      for (std::size_t j = 0; j < nj; ++j) {
        if (!(inst.dist(i, j) >= 0.0) || !std::isfinite(inst.dist(i, j))) {
          out.push_back("dist[" + std::to_string(i) + "][" + std::to_string(j) +
                        "] must be a nonnegative finite number");
        }
      }
    }
  }

  const auto nn = inst.tree.size();
  std::vector<double> child_mass(nn, 0.0);
  std::vector<int> child_count(nn, 0);
  for (std::size_t n = 0; n < nn; ++n) {
    const auto& node = inst.tree[n];
    const std::string tag = "tree[" + std::to_string(n) + "]";
    if (node.id != static_cast<int>(n)) out.push_back(tag + ".id must equal its position");
    if (n == 0) {
      if (node.parent != kInitialState) out.push_back("tree[0] must be the root (parent null)");
      if (std::abs(node.prob - 1.0) > 1e-9) out.push_back("tree[0].prob must equal 1");
    } else {
      if (node.parent < 0 || node.parent >= static_cast<int>(n)) {
        out.push_back(tag + ".parent must reference an earlier node");
      } else {
        child_mass[static_cast<std::size_t>(node.parent)] += node.prob;
        ++child_count[static_cast<std::size_t>(node.parent)];
      }
    }
    if (!(node.prob > 0.0 && node.prob <= 1.0 + 1e-12)) out.push_back(tag + ".prob must lie in (0, 1]");

    auto nonneg = [](double v) { return v >= 0.0 && std::isfinite(v); };
    auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
    auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
    check_vector(out, node, node.w, ni, "w", nonneg, "nonnegative");
    check_vector(out, node, node.bcoef, ni, "bcoef", nonneg, "nonnegative");
    check_vector(out, node, node.theta, ni, "theta", unit, "in [0, 1]");
    check_vector(out, node, node.radius, ni, "radius", positive, "positive");
    check_vector(out, node, node.cost_build, nj, "cost_build", nonneg, "nonnegative");
    check_vector(out, node, node.cost_post, nj, "cost_post", nonneg, "nonnegative");
    check_vector(out, node, node.cost_op_station, nj, "cost_op_station", nonneg, "nonnegative");
    check_vector(out, node, node.cost_op_post, nj, "cost_op_post", nonneg, "nonnegative");
  }
  for (std::size_t n = 0; n < nn; ++n) {
    if (child_count[n] > 0 && std::abs(child_mass[n] - inst.tree[n].prob) > 1e-9) {
      out.push_back("tree[" + std::to_string(n) + "]: children probabilities sum to " +
                    std::to_string(child_mass[n]) + ", expected " + std::to_string(inst.tree[n].prob));
    }
  }

  try {
    inst.queue.validate();
  } catch (const DomainError& e) {
    out.push_back(e.what());
  }

  // Coverage needs consistent shapes; skip it when those are already broken.
  if (out.empty()) {
    const auto cov = coverage_sets(inst);
    for (std::size_t n = 0; n < nn; ++n) {
      for (std::size_t i = 0; i < ni; ++i) {
        if (cov.locs_near[n][i].empty()) {
          out.push_back("zone " + std::to_string(i) + " has no candidate location within its radius at node " +
                        std::to_string(n) + "; the zone coverage constraint is infeasible");
        }
      }
    }
  }
  return out;
}

void validate(const Instance& inst) {
  auto problems = validation_problems(inst);
  if (!problems.empty()) throw ValidationError(std::move(problems));
}

}  // namespace evcap

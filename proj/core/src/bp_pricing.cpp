#include "evcap/bp.hpp"

#include <algorithm>
#include <cmath>

#include "evcap/formulation.hpp"

namespace evcap::bp {

namespace {

std::size_t sz(int v) { return static_cast<std::size_t>(v); }

// Tolerance below which a reduced cost counts as negative.
constexpr double kNegative = 1e-6;

std::vector<milp::Term> post_terms(const std::vector<int>& y) {
  std::vector<milp::Term> t;
  for (std::size_t k = 0; k < y.size(); ++k) t.push_back({y[k], double(k + 1)});
  return t;
}

}  // namespace

std::string to_string(PricingStatus s) {
  switch (s) {
    case PricingStatus::Found: return "found";
    case PricingStatus::None: return "none";
    case PricingStatus::Infeasible: return "infeasible";
    case PricingStatus::Limit: return "limit";
  }
  return "unknown";
}

Decomposition::Decomposition(const Instance& inst)
    : inst_(&inst),
      cov_(coverage_sets(inst)),
      rho_(rho_table_for(inst)),
      coeffs_(cost_coefficients(inst)),
      children_(inst.child_lists()) {
  for (int n = 0; n < inst.num_nodes(); ++n) {
    PricingBlock b;
    const auto v = add_scenario_block(b.model, inst, cov_, rho_, n, true);
    b.x = v.x;
    b.y = v.y;
    if (inst.tree[sz(n)].parent == kInitialState) {
      // The initial state is a fixed predecessor: never close, never shrink.
      for (int j = 0; j < inst.num_locations(); ++j) {
        const auto& loc = inst.locations[sz(j)];
        if (loc.x0) b.model.set_bounds(b.x[sz(j)], 1.0, 1.0);
        if (loc.y0 > 0) b.model.add_constraint(post_terms(b.y[sz(j)]), milp::Sense::GreaterEqual, loc.y0);
      }
    }
    blocks_.push_back(std::move(b));
  }
}

PricingResult solve_pricing(const Decomposition& dec, int n, const RmpDuals& duals,
                            const Column* guidance, const std::vector<Fixing>& fixings,
                            const milp::MipLimits& limits) {
  const auto& inst = dec.instance();
  const auto& block = dec.block(n);
  const auto& coeffs = dec.coeffs();
  milp::Model model = block.model;
  const int nj = inst.num_locations();

  for (int j = 0; j < nj; ++j) {
    double a = coeffs.c1(sz(n), sz(j)) - duals.pi1(sz(n), sz(j));
    double b = coeffs.c2(sz(n), sz(j)) - duals.pi2(sz(n), sz(j));
    for (int c : dec.children(n)) {
      a += duals.pi1(sz(c), sz(j));
      b += duals.pi2(sz(c), sz(j));
    }
    model.set_cost(block.x[sz(j)], a);
    const auto& y = block.y[sz(j)];
    for (std::size_t k = 0; k < y.size(); ++k) model.set_cost(y[k], double(k + 1) * b);
  }

  PricingResult out;
  auto tighten_x = [&](int j, double value) {
    const auto& v = model.variables()[sz(block.x[sz(j)])];
    const double lo = std::max(v.lower, value);
    const double hi = std::min(v.upper, value);
    if (lo > hi) return false;
    model.set_bounds(block.x[sz(j)], lo, hi);
    return true;
  };
  if (guidance) {
    for (int j = 0; j < nj; ++j) {
      if (!guidance->open[sz(j)]) continue;
      if (!tighten_x(j, 1.0)) {
        out.status = PricingStatus::Infeasible;
        return out;
      }
      model.add_constraint(post_terms(block.y[sz(j)]), milp::Sense::GreaterEqual, guidance->posts[sz(j)]);
    }
  }
  for (const auto& f : fixings) {
    if (f.node != n) continue;
    switch (f.kind) {
      case FixKind::Open:
        if (!tighten_x(f.loc, f.value)) {
          out.status = PricingStatus::Infeasible;
          return out;
        }
        break;
      case FixKind::PostsAtMost:
        model.add_constraint(post_terms(block.y[sz(f.loc)]), milp::Sense::LessEqual, f.value);
        break;
      case FixKind::PostsAtLeast:
        model.add_constraint(post_terms(block.y[sz(f.loc)]), milp::Sense::GreaterEqual, f.value);
        break;
    }
  }

  const auto sol = milp::solve_mip(model, limits);
  const double sigma = duals.sigma[sz(n)];
  out.rc_bound = sol.bound - sigma;
  if (sol.status == milp::MipStatus::Infeasible) {
    out.status = PricingStatus::Infeasible;
    return out;
  }
  if (!sol.has_incumbent()) {
    out.status = PricingStatus::Limit;
    out.reduced_cost = milp::kInf;
    return out;
  }
  out.reduced_cost = sol.objective - sigma;
  if (out.reduced_cost < -kNegative) {
    std::vector<std::uint8_t> open(sz(nj), 0);
    std::vector<int> posts(sz(nj), 0);
    for (int j = 0; j < nj; ++j) {
      if (sol.values[sz(block.x[sz(j)])] < 0.5) continue;
      open[sz(j)] = 1;
      double p = 0.0;
      const auto& y = block.y[sz(j)];
      for (std::size_t k = 0; k < y.size(); ++k) p += double(k + 1) * sol.values[sz(y[k])];
      posts[sz(j)] = std::max(1, static_cast<int>(std::lround(p)));
    }
    out.column = make_column(coeffs, n, std::move(open), std::move(posts));
    out.status = PricingStatus::Found;
  } else {
    out.status = sol.status == milp::MipStatus::Optimal ? PricingStatus::None : PricingStatus::Limit;
  }
  return out;
}

}  // namespace evcap::bp

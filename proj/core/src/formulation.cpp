#include "evcap/formulation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace evcap {

namespace {

std::size_t sz(int v) { return static_cast<std::size_t>(v); }

std::string tag(const char* name, std::initializer_list<int> idx) {
  std::string s = name;
  s += '[';
  bool first = true;
  for (int v : idx) {
    if (!first) s += ',';
    s += std::to_string(v);
    first = false;
  }
  s += ']';
  return s;
}

EvcecModel build(const Instance& inst, bool integral_posts) {
  validate(inst);
  const auto cov = coverage_sets(inst);
  const auto rho = rho_table_for(inst);
  EvcecModel out;
  auto& model = out.model;
  for (int n = 0; n < inst.num_nodes(); ++n) {
    out.index.nodes.push_back(add_scenario_block(model, inst, cov, rho, n, integral_posts));
  }

  double offset = 0.0;
  for (int n = 0; n < inst.num_nodes(); ++n) {
    const auto& node = inst.tree[sz(n)];
    const auto& cur = out.index.nodes[sz(n)];
    for (int j = 0; j < inst.num_locations(); ++j) {
      const auto& loc = inst.locations[sz(j)];
      const int xv = cur.x[sz(j)];
      std::vector<milp::Term> posts;
      for (int k = 1; k <= loc.m_max; ++k) posts.push_back({cur.y[sz(j)][sz(k - 1)], double(k)});

      // Objective: build and post purchases against the predecessor, plus
      // operation of what is installed.
      model.set_cost(xv, model.costs()[sz(xv)] +
                             node.prob * (node.cost_build[sz(j)] + node.cost_op_station[sz(j)]));
      for (const auto& t : posts) {
        model.set_cost(t.var, model.costs()[sz(t.var)] +
                                  node.prob * t.coeff * (node.cost_post[sz(j)] + node.cost_op_post[sz(j)]));
      }

      if (node.parent == kInitialState) {
        offset -= node.prob * (node.cost_build[sz(j)] * (loc.x0 ? 1.0 : 0.0) + node.cost_post[sz(j)] * loc.y0);
        model.add_constraint({{xv, 1.0}}, milp::Sense::GreaterEqual, loc.x0 ? 1.0 : 0.0,
                             tag("persist", {n, j}));
        model.add_constraint(posts, milp::Sense::GreaterEqual, loc.y0, tag("monotone", {n, j}));
        continue;
      }
      const auto& par = out.index.nodes[sz(node.parent)];
      const int xp = par.x[sz(j)];
      model.set_cost(xp, model.costs()[sz(xp)] - node.prob * node.cost_build[sz(j)]);
      for (int k = 1; k <= loc.m_max; ++k) {
        const int yp = par.y[sz(j)][sz(k - 1)];
        model.set_cost(yp, model.costs()[sz(yp)] - node.prob * node.cost_post[sz(j)] * k);
      }
      model.add_constraint({{xp, 1.0}, {xv, -1.0}}, milp::Sense::LessEqual, 0.0, tag("persist", {n, j}));
      std::vector<milp::Term> diff;
      for (int k = 1; k <= loc.m_max; ++k) diff.push_back({par.y[sz(j)][sz(k - 1)], double(k)});
      for (const auto& t : posts) diff.push_back({t.var, -t.coeff});
      model.add_constraint(std::move(diff), milp::Sense::LessEqual, 0.0, tag("monotone", {n, j}));
    }
  }
  model.set_objective_offset(offset);
  return out;
}

}  // namespace

NodeVars add_scenario_block(milp::Model& model, const Instance& inst, const CoverageSets& cov,
                            const queueing::RhoTable& rho, int n, bool integral_posts) {
  using milp::Sense;
  using milp::Term;
  const auto& node = inst.tree[sz(n)];
  const int ni = inst.num_zones();
  const int nj = inst.num_locations();
  NodeVars v;

  v.x.resize(sz(nj));
  v.y.resize(sz(nj));
  for (int j = 0; j < nj; ++j) {
    v.x[sz(j)] = model.add_binary(0.0, tag("x", {n, j}));
    for (int k = 1; k <= inst.locations[sz(j)].m_max; ++k) {
      const auto kind = integral_posts ? milp::VarKind::Binary : milp::VarKind::Continuous;
      v.y[sz(j)].push_back(model.add_variable(kind, 0.0, 1.0, 0.0, tag("y", {n, j, k})));
    }
  }
  v.alpha.resize(sz(ni));
  v.z.resize(sz(ni));
  for (int i = 0; i < ni; ++i) {
    const auto& near = cov.locs_near[sz(n)][sz(i)];
    for (int j : near) v.alpha[sz(i)].push_back(model.add_continuous(0.0, 1.0, 0.0, tag("alpha", {n, i, j})));
    for (int j : near) {
      for (int k : near) v.z[sz(i)].push_back(model.add_continuous(0.0, milp::kInf, 0.0, tag("z", {n, i, j, k})));
    }
  }

  // Congestion: arrival rate within mu * rho of the installed post count.
  for (int j = 0; j < nj; ++j) {
    std::vector<Term> terms;
    for (int i : cov.zones_near[sz(n)][sz(j)]) {
      const auto& near = cov.locs_near[sz(n)][sz(i)];
      const auto len = near.size();
      std::size_t pj = 0;
      while (near[pj] != j) ++pj;
      terms.push_back({v.alpha[sz(i)][pj], node.theta[sz(i)] * node.w[sz(i)]});
      if (node.bcoef[sz(i)] != 0.0) {
        for (std::size_t pk = 0; pk < len; ++pk) {
          terms.push_back({v.z[sz(i)][pj * len + pk], node.theta[sz(i)] * node.bcoef[sz(i)]});
        }
      }
    }
    for (int k = 1; k <= inst.locations[sz(j)].m_max; ++k) {
      terms.push_back({v.y[sz(j)][sz(k - 1)], -inst.queue.mu * rho[k]});
    }
    model.add_constraint(std::move(terms), Sense::LessEqual, 0.0, tag("congestion", {n, j}));
  }

  // Coverage of every zone.
  for (int i = 0; i < ni; ++i) {
    std::vector<Term> terms;
    for (int k : cov.locs_near[sz(n)][sz(i)]) terms.push_back({v.x[sz(k)], 1.0});
    model.add_constraint(std::move(terms), Sense::GreaterEqual, 1.0, tag("coverage", {n, i}));
  }

  // Logit probabilities through z = alpha * x.
  for (int i = 0; i < ni; ++i) {
    const auto& near = cov.locs_near[sz(n)][sz(i)];
    const auto len = near.size();
    for (std::size_t pj = 0; pj < len; ++pj) {
      const int j = near[pj];
      std::vector<Term> terms;
      for (std::size_t pk = 0; pk < len; ++pk) {
        terms.push_back({v.z[sz(i)][pj * len + pk], attraction(inst, i, near[pk])});
      }
      terms.push_back({v.x[sz(j)], -attraction(inst, i, j)});
      model.add_constraint(std::move(terms), Sense::Equal, 0.0, tag("choice", {n, i, j}));
    }
    for (std::size_t pj = 0; pj < len; ++pj) {
      const int a = v.alpha[sz(i)][pj];
      for (std::size_t pk = 0; pk < len; ++pk) {
        const int zv = v.z[sz(i)][pj * len + pk];
        const int xk = v.x[sz(near[pk])];
        const int j = near[pj];
        const int k = near[pk];
        model.add_constraint({{zv, 1.0}, {xk, -1.0}}, Sense::LessEqual, 0.0, tag("lin_x", {n, i, j, k}));
        model.add_constraint({{zv, 1.0}, {a, -1.0}}, Sense::LessEqual, 0.0, tag("lin_alpha", {n, i, j, k}));
        model.add_constraint({{zv, 1.0}, {a, -1.0}, {xk, -1.0}}, Sense::GreaterEqual, -1.0,
                             tag("lin_both", {n, i, j, k}));
      }
    }
  }

  // Posts exist exactly when the station does.
  for (int j = 0; j < nj; ++j) {
    std::vector<Term> terms;
    for (int y : v.y[sz(j)]) terms.push_back({y, 1.0});
    terms.push_back({v.x[sz(j)], -1.0});
    model.add_constraint(std::move(terms), Sense::Equal, 0.0, tag("select", {n, j}));
  }
  return v;
}

EvcecModel build_evcec(const Instance& inst) { return build(inst, true); }

EvcecModel build_revcec(const Instance& inst) { return build(inst, false); }

Deployment decode(const Instance& inst, const VarIndex& index, std::span<const double> values) {
  Deployment dep = Deployment::closed(inst);
  for (std::size_t n = 0; n < index.nodes.size(); ++n) {
    const auto& v = index.nodes[n];
    for (int j = 0; j < inst.num_locations(); ++j) {
      if (values[sz(v.x[sz(j)])] < 0.5) continue;
      double posts = 0.0;
      for (std::size_t k = 0; k < v.y[sz(j)].size(); ++k) posts += double(k + 1) * values[sz(v.y[sz(j)][k])];
      dep.set(static_cast<int>(n), j, std::max(1, static_cast<int>(std::lround(posts))));
    }
  }
  return dep;
}

std::vector<double> encode(const Instance& inst, const CoverageSets& cov, const VarIndex& index,
                           const Deployment& dep, int num_variables) {
  std::vector<double> values(sz(num_variables), 0.0);
  for (std::size_t n = 0; n < index.nodes.size(); ++n) {
    const auto& v = index.nodes[n];
    for (int j = 0; j < inst.num_locations(); ++j) {
      values[sz(v.x[sz(j)])] = dep.open(n, sz(j)) ? 1.0 : 0.0;
      const int k = dep.posts(n, sz(j));
      if (k >= 1) values[sz(v.y[sz(j)][sz(k - 1)])] = 1.0;
    }
    const auto row = dep.open.row(n);
    for (int i = 0; i < inst.num_zones(); ++i) {
      const auto& near = cov.locs_near[n][sz(i)];
      double total = 0.0;
      for (int k : near) total += row[sz(k)] ? attraction(inst, i, k) : 0.0;
      if (total <= 0.0) continue;
      const auto len = near.size();
      for (std::size_t pj = 0; pj < len; ++pj) {
        const double a = row[sz(near[pj])] ? attraction(inst, i, near[pj]) / total : 0.0;
        values[sz(v.alpha[sz(i)][pj])] = a;
        for (std::size_t pk = 0; pk < len; ++pk) {
          values[sz(v.z[sz(i)][pj * len + pk])] = row[sz(near[pk])] ? a : 0.0;
        }
      }
    }
  }
  return values;
}

std::vector<double> post_weights(const VarIndex& index, std::span<const double> values, int n, int j) {
  std::vector<double> w;
  for (int y : index.nodes[sz(n)].y[sz(j)]) w.push_back(values[sz(y)]);
  return w;
}

}  // namespace evcap

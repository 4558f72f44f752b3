#include "evcap/bp.hpp"

#include <algorithm>
#include <string>

namespace evcap::bp {

namespace {

std::size_t sz(int v) { return static_cast<std::size_t>(v); }

std::string tag(const char* name, int n, int j) {
  return std::string(name) + "[" + std::to_string(n) + "," + std::to_string(j) + "]";
}

}  // namespace

CostCoeffs cost_coefficients(const Instance& inst) {
  const auto nn = sz(inst.num_nodes());
  const auto nj = sz(inst.num_locations());
  CostCoeffs c{Grid<double>(nn, nj), Grid<double>(nn, nj), 0.0};
  for (std::size_t n = 0; n < nn; ++n) {
    const auto& node = inst.tree[n];
    for (std::size_t j = 0; j < nj; ++j) {
      c.c1(n, j) = node.prob * (node.cost_build[j] + node.cost_op_station[j]);
      c.c2(n, j) = node.prob * (node.cost_post[j] + node.cost_op_post[j]);
    }
    if (node.parent == kInitialState) {
      for (std::size_t j = 0; j < nj; ++j) {
        const auto& loc = inst.locations[j];
        c.psi += node.prob * (node.cost_build[j] * (loc.x0 ? 1.0 : 0.0) + node.cost_post[j] * loc.y0);
      }
      continue;
    }
    // Purchases at n are measured against the parent's installation.
    for (std::size_t j = 0; j < nj; ++j) {
      c.c1(sz(node.parent), j) -= node.prob * node.cost_build[j];
      c.c2(sz(node.parent), j) -= node.prob * node.cost_post[j];
    }
  }
  return c;
}

Column make_column(const CostCoeffs& coeffs, int node, std::vector<std::uint8_t> open,
                   std::vector<int> posts) {
  Column col{node, std::move(open), std::move(posts), 0.0};
  for (std::size_t j = 0; j < col.open.size(); ++j) {
    col.cost += coeffs.c1(sz(node), j) * (col.open[j] ? 1.0 : 0.0) + coeffs.c2(sz(node), j) * col.posts[j];
  }
  return col;
}

std::vector<Column> columns_of(const CostCoeffs& coeffs, const Deployment& dep) {
  std::vector<Column> cols;
  for (int n = 0; n < dep.num_nodes(); ++n) {
    const auto open = dep.open.row(sz(n));
    const auto posts = dep.posts.row(sz(n));
    cols.push_back(make_column(coeffs, n, {open.begin(), open.end()}, {posts.begin(), posts.end()}));
  }
  return cols;
}

std::vector<Fixing> propagate(const Instance& inst, const Fixing& fix) {
  std::vector<Fixing> out{fix};
  const bool down = (fix.kind == FixKind::Open && fix.value == 1) || fix.kind == FixKind::PostsAtLeast;
  if (down) {
    // Descendants have larger ids, so one forward sweep reaches all of them.
    std::vector<std::uint8_t> below(sz(inst.num_nodes()), 0);
    below[sz(fix.node)] = 1;
    for (int n = fix.node + 1; n < inst.num_nodes(); ++n) {
      const int p = inst.tree[sz(n)].parent;
      if (p == kInitialState || !below[sz(p)]) continue;
      below[sz(n)] = 1;
      out.push_back({n, fix.loc, fix.kind, fix.value});
    }
  } else {
    for (int p = inst.tree[sz(fix.node)].parent; p != kInitialState; p = inst.tree[sz(p)].parent) {
      out.push_back({p, fix.loc, fix.kind, fix.value});
    }
  }
  return out;
}

bool satisfies(const Column& col, const std::vector<Fixing>& fixings) {
  for (const auto& f : fixings) {
    if (f.node != col.node) continue;
    const int posts = col.posts[sz(f.loc)];
    switch (f.kind) {
      case FixKind::Open:
        if ((col.open[sz(f.loc)] ? 1 : 0) != f.value) return false;
        break;
      case FixKind::PostsAtMost:
        if (posts > f.value) return false;
        break;
      case FixKind::PostsAtLeast:
        if (posts < f.value) return false;
        break;
    }
  }
  return true;
}

bool contradictory(const Instance& inst, const std::vector<Fixing>& fixings) {
  const auto nn = sz(inst.num_nodes());
  const auto nj = sz(inst.num_locations());
  // Feasible post range per (n, j); an open station holds at least one post.
  Grid<int> lo(nn, nj, 0);
  Grid<int> hi(nn, nj, 0);
  for (std::size_t n = 0; n < nn; ++n) {
    for (std::size_t j = 0; j < nj; ++j) {
      hi(n, j) = inst.locations[j].m_max;
      if (inst.tree[n].parent == kInitialState) {
        const auto& loc = inst.locations[j];
        lo(n, j) = std::max(loc.y0, loc.x0 ? 1 : 0);
      }
    }
  }
  for (const auto& f : fixings) {
    auto& l = lo(sz(f.node), sz(f.loc));
    auto& h = hi(sz(f.node), sz(f.loc));
    switch (f.kind) {
      case FixKind::Open:
        if (f.value == 1) l = std::max(l, 1);
        else h = std::min(h, 0);
        break;
      case FixKind::PostsAtMost: h = std::min(h, f.value); break;
      case FixKind::PostsAtLeast: l = std::max(l, f.value); break;
    }
  }
  for (std::size_t n = 0; n < nn; ++n) {
    for (std::size_t j = 0; j < nj; ++j) {
      if (lo(n, j) > hi(n, j)) return true;
    }
  }
  return false;
}

Rmp build_rmp(const Instance& inst, const std::vector<Column>& pool,
              const std::vector<Fixing>& fixings) {
  using milp::Sense;
  using milp::Term;
  const int nn = inst.num_nodes();
  const int nj = inst.num_locations();
  Rmp rmp;
  auto& m = rmp.model;
  const auto coeffs = cost_coefficients(inst);
  m.set_objective_offset(-coeffs.psi);

  rmp.column_var.assign(pool.size(), -1);
  for (std::size_t q = 0; q < pool.size(); ++q) {
    if (!satisfies(pool[q], fixings)) continue;
    rmp.column_var[q] = m.add_continuous(0.0, milp::kInf, pool[q].cost, "lambda[" + std::to_string(q) + "]");
  }
  for (int n = 0; n < nn; ++n) {
    rmp.artificial.push_back(m.add_continuous(0.0, milp::kInf, kBigM, "artificial[" + std::to_string(n) + "]"));
  }

  // Pool columns grouped by node.
  std::vector<std::vector<std::size_t>> by_node(sz(nn));
  for (std::size_t q = 0; q < pool.size(); ++q) {
    if (rmp.column_var[q] >= 0) by_node[sz(pool[q].node)].push_back(q);
  }

  rmp.open_row = Grid<int>(sz(nn), sz(nj), -1);
  rmp.posts_row = Grid<int>(sz(nn), sz(nj), -1);
  for (int n = 0; n < nn; ++n) {
    const int parent = inst.tree[sz(n)].parent;
    for (int j = 0; j < nj; ++j) {
      const auto& loc = inst.locations[sz(j)];
      // Child installation covers the parent's: own columns minus parent's >= rhs.
      std::vector<Term> xs, ps;
      for (auto q : by_node[sz(n)]) {
        if (pool[q].open[sz(j)]) xs.push_back({rmp.column_var[q], 1.0});
        if (pool[q].posts[sz(j)] != 0) ps.push_back({rmp.column_var[q], double(pool[q].posts[sz(j)])});
      }
      double x_rhs = loc.x0 ? 1.0 : 0.0;
      double p_rhs = loc.y0;
      if (parent != kInitialState) {
        x_rhs = p_rhs = 0.0;
        for (auto q : by_node[sz(parent)]) {
          if (pool[q].open[sz(j)]) xs.push_back({rmp.column_var[q], -1.0});
          if (pool[q].posts[sz(j)] != 0) ps.push_back({rmp.column_var[q], -double(pool[q].posts[sz(j)])});
        }
      }
      const int sx = m.add_continuous(0.0, milp::kInf, kBigM, tag("slack_open", n, j));
      const int sp = m.add_continuous(0.0, milp::kInf, kBigM, tag("slack_posts", n, j));
      rmp.slacks.push_back(sx);
      rmp.slacks.push_back(sp);
      xs.push_back({sx, 1.0});
      ps.push_back({sp, 1.0});
      rmp.open_row(sz(n), sz(j)) = m.add_constraint(std::move(xs), Sense::GreaterEqual, x_rhs, tag("link_open", n, j));
      rmp.posts_row(sz(n), sz(j)) = m.add_constraint(std::move(ps), Sense::GreaterEqual, p_rhs, tag("link_posts", n, j));
    }
  }
  for (int n = 0; n < nn; ++n) {
    std::vector<Term> terms;
    for (auto q : by_node[sz(n)]) terms.push_back({rmp.column_var[q], 1.0});
    terms.push_back({rmp.artificial[sz(n)], 1.0});
    rmp.convexity_row.push_back(
        m.add_constraint(std::move(terms), Sense::Equal, 1.0, "convexity[" + std::to_string(n) + "]"));
  }
  return rmp;
}

RmpDuals extract_duals(const Instance& inst, const Rmp& rmp, const milp::LpSolution& sol) {
  const auto nn = sz(inst.num_nodes());
  const auto nj = sz(inst.num_locations());
  RmpDuals d{Grid<double>(nn, nj), Grid<double>(nn, nj), std::vector<double>(nn, 0.0)};
  for (std::size_t n = 0; n < nn; ++n) {
    for (std::size_t j = 0; j < nj; ++j) {
      d.pi1(n, j) = sol.duals[sz(rmp.open_row(n, j))];
      d.pi2(n, j) = sol.duals[sz(rmp.posts_row(n, j))];
    }
    d.sigma[n] = sol.duals[sz(rmp.convexity_row[n])];
  }
  return d;
}

}  // namespace evcap::bp

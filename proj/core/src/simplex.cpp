#include <algorithm>
#include <cmath>
#include <limits>

#include "evcap/errors.hpp"
#include "lp_engine.hpp"

namespace evcap::milp {

namespace detail {

namespace {

constexpr double kFeasTol = 1e-7;
constexpr double kOptTol = 1e-7;
constexpr double kPivotTol = 1e-9;
constexpr double kDropTol = 1e-13;
constexpr std::size_t kRefactorEvery = 64;

std::size_t sz(int v) { return static_cast<std::size_t>(v); }

struct SingularBasis {};

}  // namespace

LpEngine::LpEngine(const Model& model)
    : n_(model.num_variables()), m_(model.num_constraints()), nt_(n_ + 2 * m_) {
  // Column-wise copy of A.
  std::vector<int> count(sz(n_), 0);
  for (const auto& row : model.constraints()) {
    for (const auto& t : row.terms) ++count[sz(t.var)];
  }
  cbeg_.assign(sz(n_) + 1, 0);
  for (int j = 0; j < n_; ++j) cbeg_[sz(j) + 1] = cbeg_[sz(j)] + count[sz(j)];
  crow_.resize(sz(cbeg_.back()));
  cval_.resize(sz(cbeg_.back()));
  std::vector<int> fill(cbeg_.begin(), cbeg_.end() - 1);
  for (int r = 0; r < m_; ++r) {
    for (const auto& t : model.constraints()[sz(r)].terms) {
      const auto at = sz(fill[sz(t.var)]++);
      crow_[at] = r;
      cval_[at] = t.coeff;
    }
  }

  lo_.assign(sz(nt_), 0.0);
  up_.assign(sz(nt_), 0.0);
  cost_.assign(sz(nt_), 0.0);
  x_.assign(sz(nt_), 0.0);
  status_.assign(sz(nt_), VarStatus::AtLower);
  art_sign_.assign(sz(m_), 1.0);
  head_.assign(sz(m_), 0);
  for (int j = 0; j < n_; ++j) {
    lo_[sz(j)] = model.variables()[sz(j)].lower;
    up_[sz(j)] = model.variables()[sz(j)].upper;
    cost_[sz(j)] = model.costs()[sz(j)];
  }
  for (int r = 0; r < m_; ++r) {
    const auto& row = model.constraints()[sz(r)];
    const auto s = sz(n_ + r);
    switch (row.sense) {
      case Sense::LessEqual: lo_[s] = -kInf; up_[s] = row.rhs; break;
      case Sense::GreaterEqual: lo_[s] = row.rhs; up_[s] = kInf; break;
      case Sense::Equal: lo_[s] = row.rhs; up_[s] = row.rhs; break;
    }
  }
  offset_ = model.objective_offset();
}

template <typename F>
void LpEngine::for_column(int j, F&& f) const {
  if (j < n_) {
    for (int p = cbeg_[sz(j)]; p < cbeg_[sz(j) + 1]; ++p) f(crow_[sz(p)], cval_[sz(p)]);
  } else if (j < n_ + m_) {
    f(j - n_, -1.0);
  } else {
    f(j - n_ - m_, art_sign_[sz(j - n_ - m_)]);
  }
}

double LpEngine::column_dot(int j, const std::vector<double>& v) const {
  double s = 0.0;
  for_column(j, [&](int r, double a) { s += a * v[sz(r)]; });
  return s;
}

bool LpEngine::factor() {
  etas_.clear();
  if (m_ == 0) return true;
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(sz(m_) * 3);
  for (int i = 0; i < m_; ++i) {
    for_column(head_[sz(i)], [&](int r, double a) { trip.emplace_back(r, i, a); });
  }
  SpMat b(m_, m_);
  b.setFromTriplets(trip.begin(), trip.end());
  b.makeCompressed();
  lu_.analyzePattern(b);
  lu_.factorize(b);
  return lu_.info() == Eigen::Success;
}

void LpEngine::refactor() {
  if (!factor()) throw SingularBasis{};
  compute_basic_values();
}

void LpEngine::ftran(std::vector<double>& v) const {
  if (m_ == 0) return;
  Eigen::Map<Eigen::VectorXd> in(v.data(), m_);
  Eigen::VectorXd out = lu_.solve(in);
  for (int i = 0; i < m_; ++i) v[sz(i)] = out[i];
  for (const auto& e : etas_) {
    const double vr = v[sz(e.row)] / e.pivot;
    if (vr != 0.0) {
      for (const auto& [i, a] : e.entries) v[sz(i)] -= a * vr;
    }
    v[sz(e.row)] = vr;
  }
}

void LpEngine::btran(std::vector<double>& v) const {
  if (m_ == 0) return;
  for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
    double s = v[sz(it->row)];
    for (const auto& [i, a] : it->entries) s -= a * v[sz(i)];
    v[sz(it->row)] = s / it->pivot;
  }
  Eigen::Map<Eigen::VectorXd> in(v.data(), m_);
  Eigen::VectorXd out = lu_.transpose().solve(in);
  for (int i = 0; i < m_; ++i) v[sz(i)] = out[i];
}

std::vector<double> LpEngine::ftran_column(int j) const {
  std::vector<double> v(sz(m_), 0.0);
  for_column(j, [&](int r, double a) { v[sz(r)] += a; });
  ftran(v);
  return v;
}

std::vector<double> LpEngine::compute_duals(const std::vector<double>& cost) const {
  std::vector<double> y(sz(m_));
  for (int i = 0; i < m_; ++i) y[sz(i)] = cost[sz(head_[sz(i)])];
  btran(y);
  return y;
}

void LpEngine::compute_basic_values() {
  std::vector<double> rhs(sz(m_), 0.0);
  for (int j = 0; j < nt_; ++j) {
    if (status_[sz(j)] == VarStatus::Basic || x_[sz(j)] == 0.0) continue;
    const double xj = x_[sz(j)];
    for_column(j, [&](int r, double a) { rhs[sz(r)] -= a * xj; });
  }
  ftran(rhs);
  for (int i = 0; i < m_; ++i) x_[sz(head_[sz(i)])] = rhs[sz(i)];
}

void LpEngine::pivot(int row, int entering, const std::vector<double>& alpha) {
  Eta e{row, alpha[sz(row)], {}};
  for (int i = 0; i < m_; ++i) {
    if (i != row && std::abs(alpha[sz(i)]) > kDropTol) e.entries.emplace_back(i, alpha[sz(i)]);
  }
  etas_.push_back(std::move(e));
  head_[sz(row)] = entering;
  status_[sz(entering)] = VarStatus::Basic;
}

void LpEngine::place_nonbasic(int j) {
  const auto u = sz(j);
  const bool has_lo = std::isfinite(lo_[u]);
  const bool has_up = std::isfinite(up_[u]);
  auto& st = status_[u];
  if (st == VarStatus::AtUpper && !has_up) st = has_lo ? VarStatus::AtLower : VarStatus::FreeZero;
  if (st == VarStatus::AtLower && !has_lo) st = has_up ? VarStatus::AtUpper : VarStatus::FreeZero;
  if (st == VarStatus::FreeZero && (has_lo || has_up)) st = has_lo ? VarStatus::AtLower : VarStatus::AtUpper;
  x_[u] = st == VarStatus::AtLower ? lo_[u] : st == VarStatus::AtUpper ? up_[u] : 0.0;
}

void LpEngine::set_bounds(int var, double lower, double upper) {
  lo_[sz(var)] = lower;
  up_[sz(var)] = upper;
}

void LpEngine::load_basis(const Basis& basis) {
  head_ = basis.head;
  status_ = basis.status;
  factored_ = factor();
}

bool LpEngine::primal_feasible() const {
  for (int i = 0; i < m_; ++i) {
    const auto b = sz(head_[sz(i)]);
    if (x_[b] < lo_[b] - kFeasTol || x_[b] > up_[b] + kFeasTol) return false;
  }
  return true;
}

LpStatus LpEngine::primal(const std::vector<double>& cost) {
  const long bland_after = 10L * (m_ + n_);
  const long cap = call_start_ + 50L * (m_ + n_) + 10000;
  long degenerate = 0;
  bool bland = false;
  for (;;) {
    if (iterations_ >= cap) return LpStatus::IterationLimit;
    if (etas_.size() >= kRefactorEvery) refactor();
    const auto y = compute_duals(cost);

    int q = -1;
    int dir = 0;
    double best = 0.0;
    for (int j = 0; j < nt_; ++j) {
      const auto st = status_[sz(j)];
      if (st == VarStatus::Basic || is_fixed(j)) continue;
      const double d = cost[sz(j)] - column_dot(j, y);
      int dj = 0;
      if (st == VarStatus::AtLower) dj = d < -kOptTol ? 1 : 0;
      else if (st == VarStatus::AtUpper) dj = d > kOptTol ? -1 : 0;
      else if (std::abs(d) > kOptTol) dj = d < 0 ? 1 : -1;
      if (dj == 0) continue;
      if (bland) {
        q = j;
        dir = dj;
        break;
      }
      if (std::abs(d) > best) {
        best = std::abs(d);
        q = j;
        dir = dj;
      }
    }
    if (q < 0) return LpStatus::Optimal;

    const auto alpha = ftran_column(q);
    const double flip = up_[sz(q)] - lo_[sz(q)];  // inf for half-bounded or free
    auto step_to_bound = [&](int i, double tol) {
      const double a = dir * alpha[sz(i)];
      const auto b = sz(head_[sz(i)]);
      if (a > kPivotTol && std::isfinite(lo_[b])) return (x_[b] - lo_[b] + tol) / a;
      if (a < -kPivotTol && std::isfinite(up_[b])) return (up_[b] - x_[b] + tol) / -a;
      return kInf;
    };

    int leave = -1;
    double theta = kInf;
    if (bland) {
      for (int i = 0; i < m_; ++i) {
        const double t = std::max(0.0, step_to_bound(i, 0.0));
        if (t < theta || (t == theta && leave >= 0 && t < kInf && head_[sz(i)] < head_[sz(leave)])) {
          theta = t;
          leave = t < kInf ? i : -1;
        }
      }
    } else {
      double relaxed = kInf;
      for (int i = 0; i < m_; ++i) relaxed = std::min(relaxed, step_to_bound(i, kFeasTol));
      double best_pivot = 0.0;
      for (int i = 0; i < m_; ++i) {
        const double t = step_to_bound(i, 0.0);
        if (t <= relaxed && t < kInf && std::abs(alpha[sz(i)]) > best_pivot) {
          best_pivot = std::abs(alpha[sz(i)]);
          leave = i;
          theta = std::max(0.0, t);
        }
      }
    }

    if (flip <= theta) {
      theta = flip;
      leave = -1;
    }
    if (!std::isfinite(theta)) return LpStatus::Unbounded;

    for (int i = 0; i < m_; ++i) x_[sz(head_[sz(i)])] -= dir * theta * alpha[sz(i)];
    x_[sz(q)] += dir * theta;
    if (leave < 0) {
      status_[sz(q)] = dir > 0 ? VarStatus::AtUpper : VarStatus::AtLower;
      x_[sz(q)] = dir > 0 ? up_[sz(q)] : lo_[sz(q)];
    } else {
      const int b = head_[sz(leave)];
      const bool to_lower = dir * alpha[sz(leave)] > 0;
      status_[sz(b)] = to_lower ? VarStatus::AtLower : VarStatus::AtUpper;
      x_[sz(b)] = to_lower ? lo_[sz(b)] : up_[sz(b)];
      if (b >= n_ + m_) up_[sz(b)] = lo_[sz(b)] = x_[sz(b)] = 0.0;  // artificials never re-enter
      pivot(leave, q, alpha);
    }
    ++iterations_;
    if (theta <= 1e-12 && ++degenerate > bland_after) bland = true;
  }
}

LpStatus LpEngine::dual(const std::vector<double>& cost) {
  const long cap = call_start_ + 50L * (m_ + n_) + 10000;
  for (;;) {
    if (iterations_ >= cap) return LpStatus::IterationLimit;
    if (etas_.size() >= kRefactorEvery) refactor();

    int r = -1;
    double worst = kFeasTol;
    for (int i = 0; i < m_; ++i) {
      const auto b = sz(head_[sz(i)]);
      const double infeas = std::max(lo_[b] - x_[b], x_[b] - up_[b]);
      if (infeas > worst) {
        worst = infeas;
        r = i;
      }
    }
    if (r < 0) return LpStatus::Optimal;

    const int b = head_[sz(r)];
    const bool going_up = x_[sz(b)] < lo_[sz(b)];
    const double target = going_up ? lo_[sz(b)] : up_[sz(b)];

    std::vector<double> rho(sz(m_), 0.0);
    rho[sz(r)] = 1.0;
    btran(rho);
    const auto y = compute_duals(cost);

    // Candidates: (column, |alpha_rj|, dual ratio).
    struct Cand {
      int j;
      double mag;
      double ratio;
    };
    std::vector<Cand> cands;
    double relaxed = kInf;
    for (int j = 0; j < nt_; ++j) {
      const auto st = status_[sz(j)];
      if (st == VarStatus::Basic || is_fixed(j)) continue;
      const double arj = column_dot(j, rho);
      if (std::abs(arj) <= kPivotTol) continue;
      bool ok = false;
      double dval = cost[sz(j)] - column_dot(j, y);
      if (st == VarStatus::AtLower) {
        ok = going_up ? arj < 0 : arj > 0;
        dval = std::max(dval, 0.0);
      } else if (st == VarStatus::AtUpper) {
        ok = going_up ? arj > 0 : arj < 0;
        dval = std::max(-dval, 0.0);
      } else {
        ok = true;
        dval = std::abs(dval);
      }
      if (!ok) continue;
      cands.push_back({j, std::abs(arj), dval / std::abs(arj)});
      relaxed = std::min(relaxed, (dval + kOptTol) / std::abs(arj));
    }
    if (cands.empty()) return LpStatus::Infeasible;
    int q = -1;
    double best_mag = 0.0;
    for (const auto& c : cands) {
      if (c.ratio <= relaxed && c.mag > best_mag) {
        best_mag = c.mag;
        q = c.j;
      }
    }

    const auto alpha = ftran_column(q);
    if (std::abs(alpha[sz(r)]) <= kPivotTol) {
      // Row and column disagree numerically; rebuild and retry.
      refactor();
      ++iterations_;
      continue;
    }
    const double delta = (x_[sz(b)] - target) / alpha[sz(r)];
    for (int i = 0; i < m_; ++i) x_[sz(head_[sz(i)])] -= alpha[sz(i)] * delta;
    x_[sz(q)] += delta;
    x_[sz(b)] = target;
    status_[sz(b)] = going_up ? VarStatus::AtLower : VarStatus::AtUpper;
    pivot(r, q, alpha);
    ++iterations_;
  }
}

void LpEngine::drive_out_artificials() {
  for (int i = 0; i < m_; ++i) {
    if (head_[sz(i)] < n_ + m_) continue;
    std::vector<double> rho(sz(m_), 0.0);
    rho[sz(i)] = 1.0;
    btran(rho);
    int q = -1;
    double best = 1e-7;
    for (int j = 0; j < n_ + m_; ++j) {
      if (status_[sz(j)] == VarStatus::Basic || is_fixed(j)) continue;
      const double a = std::abs(column_dot(j, rho));
      if (a > best) {
        best = a;
        q = j;
      }
    }
    if (q < 0) continue;  // redundant row; the artificial stays basic at zero
    const auto alpha = ftran_column(q);
    const int b = head_[sz(i)];
    const double delta = x_[sz(b)] / alpha[sz(i)];
    for (int k = 0; k < m_; ++k) x_[sz(head_[sz(k)])] -= alpha[sz(k)] * delta;
    x_[sz(q)] += delta;
    x_[sz(b)] = 0.0;
    status_[sz(b)] = VarStatus::AtLower;
    pivot(i, q, alpha);
    if (etas_.size() >= kRefactorEvery) refactor();
  }
}

LpStatus LpEngine::solve() {
  call_start_ = iterations_;
  for (int j = 0; j < n_ + m_; ++j) {
    status_[sz(j)] = VarStatus::AtLower;
    place_nonbasic(j);
  }
  std::vector<double> activity(sz(m_), 0.0);
  for (int j = 0; j < n_; ++j) {
    const double xj = x_[sz(j)];
    if (xj != 0.0) for_column(j, [&](int r, double a) { activity[sz(r)] += a * xj; });
  }
  bool any_artificial = false;
  double scale = 1.0;
  for (int r = 0; r < m_; ++r) {
    const auto s = sz(n_ + r);
    const auto a = sz(n_ + m_ + r);
    const double act = activity[sz(r)];
    lo_[a] = up_[a] = x_[a] = 0.0;
    status_[a] = VarStatus::AtLower;
    if (act >= lo_[s] && act <= up_[s]) {
      head_[sz(r)] = n_ + r;
      status_[s] = VarStatus::Basic;
      x_[s] = act;
      continue;
    }
    const double bound = act < lo_[s] ? lo_[s] : up_[s];
    status_[s] = act < lo_[s] ? VarStatus::AtLower : VarStatus::AtUpper;
    x_[s] = bound;
    art_sign_[sz(r)] = bound > act ? 1.0 : -1.0;
    up_[a] = kInf;
    x_[a] = std::abs(bound - act);
    status_[a] = VarStatus::Basic;
    head_[sz(r)] = n_ + m_ + r;
    any_artificial = true;
    scale = std::max(scale, std::abs(bound));
  }
  factored_ = factor();
  if (!factored_) throw ConvergenceError("initial simplex basis is singular");

  try {
    if (any_artificial) {
      std::vector<double> phase1(sz(nt_), 0.0);
      for (int r = 0; r < m_; ++r) phase1[sz(n_ + m_ + r)] = 1.0;
      const auto st = primal(phase1);
      if (st == LpStatus::IterationLimit) return st;
      double infeas = 0.0;
      for (int r = 0; r < m_; ++r) infeas += x_[sz(n_ + m_ + r)];
      if (infeas > kFeasTol * scale) return LpStatus::Infeasible;
      for (int r = 0; r < m_; ++r) {
        const auto a = sz(n_ + m_ + r);
        lo_[a] = up_[a] = 0.0;
      }
      drive_out_artificials();
    }
    return primal(cost_);
  } catch (const SingularBasis&) {
    factored_ = false;
    throw ConvergenceError("simplex basis became singular");
  }
}

LpStatus LpEngine::resolve() {
  if (!factored_) return solve();
  call_start_ = iterations_;
  try {
    for (int j = 0; j < nt_; ++j) {
      if (status_[sz(j)] != VarStatus::Basic) place_nonbasic(j);
    }
    compute_basic_values();

    // Make the basis dual feasible by flipping boxed columns.
    const auto y = compute_duals(cost_);
    bool dual_ok = true;
    for (int j = 0; j < nt_; ++j) {
      const auto st = status_[sz(j)];
      if (st == VarStatus::Basic || is_fixed(j)) continue;
      const double d = cost_[sz(j)] - column_dot(j, y);
      const bool boxed = std::isfinite(lo_[sz(j)]) && std::isfinite(up_[sz(j)]);
      if (st == VarStatus::AtLower && d < -kOptTol) {
        if (boxed) status_[sz(j)] = VarStatus::AtUpper;
        else dual_ok = false;
      } else if (st == VarStatus::AtUpper && d > kOptTol) {
        if (boxed) status_[sz(j)] = VarStatus::AtLower;
        else dual_ok = false;
      } else if (st == VarStatus::FreeZero && std::abs(d) > kOptTol) {
        dual_ok = false;
      }
      place_nonbasic(j);
    }
    compute_basic_values();

    if (dual_ok) {
      const auto st = dual(cost_);
      if (st != LpStatus::Optimal) return st;
      return primal(cost_);
    }
    if (primal_feasible()) return primal(cost_);
  } catch (const SingularBasis&) {
    factored_ = false;
  }
  return solve();
}

double LpEngine::objective() const {
  double z = offset_;
  for (int j = 0; j < n_; ++j) z += cost_[sz(j)] * x_[sz(j)];
  return z;
}

std::vector<double> LpEngine::values() const {
  return std::vector<double>(x_.begin(), x_.begin() + n_);
}

std::vector<double> LpEngine::duals() { return compute_duals(cost_); }

std::vector<double> LpEngine::reduced_costs() {
  const auto y = compute_duals(cost_);
  std::vector<double> d(sz(n_));
  for (int j = 0; j < n_; ++j) d[sz(j)] = cost_[sz(j)] - column_dot(j, y);
  return d;
}

LpSolution LpEngine::solution(LpStatus status) {
  LpSolution sol;
  sol.status = status;
  sol.iterations = iterations_;
  if (status == LpStatus::Optimal) {
    sol.values = values();
    sol.objective = objective();
    sol.duals = duals();
    sol.reduced_costs = reduced_costs();
  }
  return sol;
}

}  // namespace detail

LpSolution solve_lp(const Model& model) {
  model.validate();
  detail::LpEngine engine(model);
  const auto status = engine.solve();
  return engine.solution(status);
}

}  // namespace evcap::milp

#include <algorithm>
#include <cmath>
#include <ostream>
#include <unordered_set>

#include "evcap/errors.hpp"
#include "evcap/milp.hpp"

namespace evcap::milp {

int Model::add_variable(VarKind kind, double lower, double upper, double cost, std::string name) {
  vars_.push_back(Variable{kind, lower, upper, std::move(name)});
  cost_.push_back(cost);
  return static_cast<int>(vars_.size()) - 1;
}

int Model::add_constraint(std::vector<Term> terms, Sense sense, double rhs, std::string name) {
  std::unordered_set<int> seen;
  for (const auto& t : terms) {
    if (t.var < 0 || t.var >= num_variables()) {
      throw DomainError("constraint '" + name + "' references unknown variable " + std::to_string(t.var));
    }
    if (!seen.insert(t.var).second) {
      throw DomainError("constraint '" + name + "' repeats variable " + std::to_string(t.var));
    }
  }
  rows_.push_back(Constraint{std::move(terms), sense, rhs, std::move(name)});
  return static_cast<int>(rows_.size()) - 1;
}

void Model::set_cost(int var, double cost) { cost_.at(static_cast<std::size_t>(var)) = cost; }

void Model::set_bounds(int var, double lower, double upper) {
  auto& v = vars_.at(static_cast<std::size_t>(var));
  v.lower = lower;
  v.upper = upper;
}

void Model::set_kind(int var, VarKind kind) { vars_.at(static_cast<std::size_t>(var)).kind = kind; }

int Model::num_binaries() const {
  return static_cast<int>(std::count_if(vars_.begin(), vars_.end(),
                                        [](const Variable& v) { return v.kind == VarKind::Binary; }));
}

void Model::validate() const {
  for (std::size_t j = 0; j < vars_.size(); ++j) {
    const auto& v = vars_[j];
    if (std::isnan(v.lower) || std::isnan(v.upper) || v.lower > v.upper) {
      throw DomainError("variable " + std::to_string(j) + " has invalid bounds");
    }
    if (v.kind == VarKind::Binary && (v.lower < 0.0 || v.upper > 1.0)) {
      throw DomainError("binary variable " + std::to_string(j) + " has bounds outside [0, 1]");
    }
    if (!std::isfinite(cost_[j])) throw DomainError("variable " + std::to_string(j) + " has non-finite cost");
  }
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    std::unordered_set<int> seen;
    for (const auto& t : rows_[r].terms) {
      if (t.var < 0 || t.var >= num_variables() || !seen.insert(t.var).second || !std::isfinite(t.coeff)) {
        throw DomainError("constraint " + std::to_string(r) + " has an invalid term");
      }
    }
    if (!std::isfinite(rows_[r].rhs)) throw DomainError("constraint " + std::to_string(r) + " has non-finite rhs");
  }
}

double Model::objective(std::span<const double> values) const {
  double z = offset_;
  for (std::size_t j = 0; j < cost_.size(); ++j) z += cost_[j] * values[j];
  return z;
}

double Model::max_violation(std::span<const double> values) const {
  double worst = 0.0;
  for (std::size_t j = 0; j < vars_.size(); ++j) {
    worst = std::max({worst, vars_[j].lower - values[j], values[j] - vars_[j].upper});
  }
  for (const auto& row : rows_) {
    double lhs = 0.0;
    for (const auto& t : row.terms) lhs += t.coeff * values[static_cast<std::size_t>(t.var)];
    switch (row.sense) {
      case Sense::LessEqual: worst = std::max(worst, lhs - row.rhs); break;
      case Sense::GreaterEqual: worst = std::max(worst, row.rhs - lhs); break;
      case Sense::Equal: worst = std::max(worst, std::abs(lhs - row.rhs)); break;
    }
  }
  return worst;
}

namespace {

std::string var_label(const Model& m, int j) {
  const auto& name = m.variables()[static_cast<std::size_t>(j)].name;
  return name.empty() ? "v" + std::to_string(j) : name;
}

void write_terms(std::ostream& os, const Model& m, const std::vector<Term>& terms) {
  bool first = true;
  for (const auto& t : terms) {
    if (t.coeff == 0.0) continue;
    os << (t.coeff < 0 ? (first ? "-" : " - ") : (first ? "" : " + "));
    if (std::abs(t.coeff) != 1.0) os << std::abs(t.coeff) << ' ';
    os << var_label(m, t.var);
    first = false;
  }
  if (first) os << '0';
}

}  // namespace

void Model::write_lp(std::ostream& os) const {
  os << "Minimize\n obj: ";
  std::vector<Term> obj;
  for (std::size_t j = 0; j < cost_.size(); ++j) {
    if (cost_[j] != 0.0) obj.push_back({static_cast<int>(j), cost_[j]});
  }
  write_terms(os, *this, obj);
  if (offset_ != 0.0) os << (offset_ < 0 ? " - " : " + ") << std::abs(offset_);
  os << "\nSubject To\n";
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    const auto& row = rows_[r];
    os << ' ' << (row.name.empty() ? "c" + std::to_string(r) : row.name) << ": ";
    write_terms(os, *this, row.terms);
    os << (row.sense == Sense::LessEqual ? " <= " : row.sense == Sense::GreaterEqual ? " >= " : " = ")
       << row.rhs << '\n';
  }
  os << "Bounds\n";
  for (std::size_t j = 0; j < vars_.size(); ++j) {
    const auto& v = vars_[j];
    if (v.kind == VarKind::Binary) continue;
    os << ' ';
    if (std::isinf(v.lower)) os << "-inf"; else os << v.lower;
    os << " <= " << var_label(*this, static_cast<int>(j)) << " <= ";
    if (std::isinf(v.upper)) os << "+inf"; else os << v.upper;
    os << '\n';
  }
  os << "Binaries\n";
  for (std::size_t j = 0; j < vars_.size(); ++j) {
    if (vars_[j].kind == VarKind::Binary) os << ' ' << var_label(*this, static_cast<int>(j)) << '\n';
  }
  os << "End\n";
}

std::string to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::IterationLimit: return "iteration_limit";
  }
  return "unknown";
}

std::string to_string(MipStatus s) {
  switch (s) {
    case MipStatus::Optimal: return "optimal";
    case MipStatus::Feasible: return "feasible";
    case MipStatus::Infeasible: return "infeasible";
    case MipStatus::Unbounded: return "unbounded";
    case MipStatus::TimeLimit: return "time_limit";
  }
  return "unknown";
}

const Solver& embedded_solver() {
  static const EmbeddedSolver solver;
  return solver;
}

}  // namespace evcap::milp

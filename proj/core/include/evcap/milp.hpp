#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace evcap::milp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class VarKind { Continuous, Binary };
enum class Sense { LessEqual, GreaterEqual, Equal };

struct Variable {
  VarKind kind = VarKind::Continuous;
  double lower = 0.0;
  double upper = kInf;
  std::string name;
};

struct Term {
  int var = 0;
  double coeff = 0.0;
};

struct Constraint {
  std::vector<Term> terms;
  Sense sense = Sense::LessEqual;
  double rhs = 0.0;
  std::string name;
};

/// Minimisation model: dense variable ids, sparse rows, linear objective with
/// a constant offset.
class Model {
 public:
  int add_variable(VarKind kind, double lower, double upper, double cost = 0.0,
                   std::string name = {});
  int add_binary(double cost = 0.0, std::string name = {}) {
    return add_variable(VarKind::Binary, 0.0, 1.0, cost, std::move(name));
  }
  int add_continuous(double lower, double upper, double cost = 0.0, std::string name = {}) {
    return add_variable(VarKind::Continuous, lower, upper, cost, std::move(name));
  }

  /// Terms must reference existing variables, each at most once.
  int add_constraint(std::vector<Term> terms, Sense sense, double rhs, std::string name = {});

  void set_cost(int var, double cost);
  void set_objective_offset(double offset) { offset_ = offset; }
  void set_bounds(int var, double lower, double upper);
  void set_kind(int var, VarKind kind);

  const std::vector<Variable>& variables() const noexcept { return vars_; }
  const std::vector<Constraint>& constraints() const noexcept { return rows_; }
  const std::vector<double>& costs() const noexcept { return cost_; }
  double objective_offset() const noexcept { return offset_; }

  int num_variables() const noexcept { return static_cast<int>(vars_.size()); }
  int num_constraints() const noexcept { return static_cast<int>(rows_.size()); }
  int num_binaries() const;

  /// Throws DomainError when an invariant is broken (binary bounds outside
  /// [0, 1], crossed bounds, duplicate or dangling term ids).
  void validate() const;

  double objective(std::span<const double> values) const;

  /// Largest bound or row violation of a point.
  double max_violation(std::span<const double> values) const;

  /// Human-readable LP-format dump, meant for debugging only.
  void write_lp(std::ostream& os) const;

 private:
  std::vector<Variable> vars_;
  std::vector<double> cost_;
  std::vector<Constraint> rows_;
  double offset_ = 0.0;
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

/// Duals follow the minimisation convention: >= rows carry nonnegative duals,
/// <= rows nonpositive, equality rows free. Reduced costs are c - A^T y.
struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  std::vector<double> values;
  double objective = 0.0;
  std::vector<double> duals;
  std::vector<double> reduced_costs;
  long iterations = 0;
};

enum class MipStatus { Optimal, Feasible, Infeasible, Unbounded, TimeLimit };

struct MipLimits {
  double time_limit_s = kInf;
  double gap_tol = 1e-6;
  long node_limit = std::numeric_limits<long>::max();
  /// Optional starting point; used as incumbent when feasible.
  std::optional<std::vector<double>> incumbent_hint;
};

struct MipSolution {
  MipStatus status = MipStatus::Infeasible;
  std::vector<double> values;  // empty when no incumbent was found
  double objective = kInf;
  double bound = -kInf;
  double gap = kInf;  // (objective - bound) / max(|objective|, eps)
  long nodes = 0;
  long lp_iterations = 0;
  double seconds = 0.0;

  bool has_incumbent() const noexcept { return !values.empty(); }
};

std::string to_string(LpStatus s);
std::string to_string(MipStatus s);

LpSolution solve_lp(const Model& model);
MipSolution solve_mip(const Model& model, const MipLimits& limits = {});

/// Narrow solver contract used by the planning algorithms. The embedded
/// kernel is the default; an adapter for an external solver implements the
/// same two calls.
class Solver {
 public:
  virtual ~Solver() = default;
  virtual LpSolution solve_lp(const Model& model) const = 0;
  virtual MipSolution solve_mip(const Model& model, const MipLimits& limits) const = 0;
};

class EmbeddedSolver final : public Solver {
 public:
  LpSolution solve_lp(const Model& model) const override { return milp::solve_lp(model); }
  MipSolution solve_mip(const Model& model, const MipLimits& limits) const override {
    return milp::solve_mip(model, limits);
  }
};

/// Process-wide embedded solver instance.
const Solver& embedded_solver();

}  // namespace evcap::milp

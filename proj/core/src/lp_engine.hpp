#pragma once

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <cstdint>
#include <utility>
#include <vector>

#include "evcap/milp.hpp"

namespace evcap::milp::detail {

enum class VarStatus : std::uint8_t { Basic, AtLower, AtUpper, FreeZero };

/// Basis snapshot: the basic column of every row plus the status of every
/// column (structural, logical, artificial).
struct Basis {
  std::vector<int> head;
  std::vector<VarStatus> status;
};

/// Bounded revised simplex over A x - s = 0, where the logical s_r carries the
/// row bounds. Column layout: n structurals, m logicals, m artificials.
/// The basis is held as a sparse LU factorisation plus an eta file.
class LpEngine {
 public:
  explicit LpEngine(const Model& model);

  /// Cold two-phase primal simplex from a slack/artificial basis.
  LpStatus solve();
  /// Warm start from the current basis after bound changes: dual simplex,
  /// then a primal clean-up pass. Falls back to solve() when needed.
  LpStatus resolve();

  void set_bounds(int var, double lower, double upper);
  double lower(int var) const { return lo_[static_cast<std::size_t>(var)]; }
  double upper(int var) const { return up_[static_cast<std::size_t>(var)]; }

  bool has_basis() const noexcept { return factored_; }
  Basis basis() const { return Basis{head_, status_}; }
  void load_basis(const Basis& basis);

  double objective() const;
  std::vector<double> values() const;
  std::vector<double> duals();
  std::vector<double> reduced_costs();
  long iterations() const noexcept { return iterations_; }

  LpSolution solution(LpStatus status);

 private:
  using SpMat = Eigen::SparseMatrix<double>;

  struct Eta {
    int row;
    double pivot;
    std::vector<std::pair<int, double>> entries;  // off-pivot column entries
  };

  template <typename F>
  void for_column(int j, F&& f) const;
  double column_dot(int j, const std::vector<double>& v) const;

  bool factor();
  void refactor();
  void ftran(std::vector<double>& v) const;
  void btran(std::vector<double>& v) const;
  std::vector<double> ftran_column(int j) const;
  std::vector<double> compute_duals(const std::vector<double>& cost) const;
  void compute_basic_values();
  void pivot(int row, int entering, const std::vector<double>& alpha);
  void place_nonbasic(int j);

  LpStatus primal(const std::vector<double>& cost);
  LpStatus dual(const std::vector<double>& cost);
  void drive_out_artificials();
  bool primal_feasible() const;

  bool is_fixed(int j) const { return lo_[static_cast<std::size_t>(j)] == up_[static_cast<std::size_t>(j)]; }

  int n_ = 0;
  int m_ = 0;
  int nt_ = 0;
  std::vector<int> cbeg_;
  std::vector<int> crow_;
  std::vector<double> cval_;
  std::vector<double> art_sign_;
  std::vector<double> lo_, up_, cost_, x_;
  std::vector<VarStatus> status_;
  std::vector<int> head_;
  double offset_ = 0.0;

  mutable Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu_;  // transpose() is non-const
  std::vector<Eta> etas_;
  bool factored_ = false;
  long iterations_ = 0;
  long call_start_ = 0;
};

}  // namespace evcap::milp::detail

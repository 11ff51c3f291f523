#pragma once

// Dense bounded-variable simplex. Primal simplex with an artificial phase 1
// for cold starts; dual simplex for re-solves after bound changes.

#include <cstddef>
#include <limits>
#include <vector>

#include "mlrfe/model.hpp"

namespace mlrfe {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct LpRow {
  std::vector<int> idx;
  std::vector<double> val;
  RowSense sense = RowSense::Le;
  double rhs = 0.0;
};

/// min c'x + offset  s.t. rows, lo <= x <= hi.
struct LpProblem {
  std::vector<double> lo;
  std::vector<double> hi;
  std::vector<double> cost;
  std::vector<LpRow> rows;
  double cost_offset = 0.0;

  std::size_t num_cols() const { return cost.size(); }
  std::size_t num_rows() const { return rows.size(); }
  std::size_t nonzeros() const;

  int add_column(double lo, double hi, double cost = 0.0);
  /// Appends a row, merging repeated indices and dropping zero coefficients.
  int add_row(std::vector<int> idx, std::vector<double> val, RowSense sense, double rhs);
};

enum class LpStatus { Optimal, Infeasible, Unbounded };
const char* to_string(LpStatus status);

enum class BasisStatus : unsigned char { Basic, AtLower, AtUpper, AtZero };
/// Status of every structural column followed by every row slack.
using LpBasis = std::vector<BasisStatus>;

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  std::vector<double> x;
  double objective = kInf;
  /// Row duals y with reduced costs d = c - A'y.
  std::vector<double> duals;
  int iterations = 0;
  LpBasis basis;  // filled when Optimal
};

struct LpOptions {
  double primal_tol = 1e-9;
  double dual_tol = 1e-9;
  double pivot_tol = 1e-9;
  /// Phase-1 residual on any row above this, relative to 1 + |rhs|, declares
  /// infeasibility. Matches the residual test applied to optimal answers.
  double infeasible_tol = 1e-7;
  int max_iterations = 100000;
  int refactor_interval = 100;
  int max_refactor_retries = 3;
  std::size_t max_nonzeros = 50000;
  /// Equilibrate rows and columns before solving.
  bool scale = true;
};

/// Solver state kept across re-solves so branch-and-bound can change column
/// bounds and continue from the last optimal basis.
class DenseSimplex {
 public:
  explicit DenseSimplex(const LpProblem& lp, LpOptions options = {});

  void set_bounds(int col, double lo, double hi);
  double lower(int col) const { return lo_[col] * col_scale_[col]; }
  double upper(int col) const { return hi_[col] * col_scale_[col]; }

  /// Solves from the current basis when one exists, otherwise from scratch.
  LpResult solve();
  /// Discards the basis and solves from scratch.
  LpResult solve_cold();
  /// Installs a basis from a solve of a problem with the same shape. Returns
  /// false, leaving the solver cold, when it does not fit.
  bool set_basis(const LpBasis& basis);

 private:
  using Where = BasisStatus;

  double& tab(std::size_t r, std::size_t j) { return tableau_[r * ncols_ + j]; }
  double tab(std::size_t r, std::size_t j) const { return tableau_[r * ncols_ + j]; }
  double original(std::size_t r, std::size_t j) const;

  void compute_scaling();
  void cold_start();
  bool refactor();
  void compute_reduced_costs(const std::vector<double>& cost);
  void pivot(std::size_t row, std::size_t col);
  void place_nonbasic(std::size_t j);

  enum class Outcome { Optimal, Unbounded, Infeasible, IterationLimit };
  Outcome primal(const std::vector<double>& cost);
  Outcome dual(const std::vector<double>& cost);
  bool primal_feasible() const;
  bool dual_feasible() const;
  bool eligible_to_enter(std::size_t j) const;

  LpResult finish(LpStatus status);
  bool verify(double* primal_residual) const;
  LpResult solve_from_scratch();

  const LpProblem& lp_;
  LpOptions opt_;
  std::size_t m_ = 0;
  std::size_t n_ = 0;
  std::size_t ncols_ = 0;  // structural + slack + artificial

  std::vector<double> dense_a_;  // m x (n + m) original structural + slack
  std::vector<double> row_scale_, col_scale_;  // A' = R A C, x = C x'
  std::vector<double> rhs_;
  std::vector<std::vector<std::pair<std::size_t, double>>> sparse_rows_;  // [A' | I]
  std::vector<std::size_t> nz_;
  std::size_t width_ = 0;  // tableau columns kept up to date
  std::vector<double> art_sign_;
  std::vector<double> lo_, hi_, cost2_;
  std::vector<double> tableau_;
  std::vector<double> beta_;
  std::vector<double> value_;  // nonbasic values
  std::vector<double> d_;
  std::vector<std::size_t> basis_;
  std::vector<Where> where_;
  bool has_basis_ = false;
  bool bland_ = false;
  int iterations_ = 0;
  int since_refactor_ = 0;
};

/// One-shot solve, optionally from a starting basis; a scaled run that fails
/// numerically is repeated unscaled and cold.
LpResult solve_lp(const LpProblem& lp, const LpOptions& options = {},
                  const LpBasis* start = nullptr);

/// Lagrangian lower bound y'b + sum_j min over [lo_j, hi_j] of d_j x_j,
/// with row slacks treated as bounded columns. -inf when y is not
/// sign-feasible.
double lp_dual_bound(const LpProblem& lp, const std::vector<double>& duals);

}  // namespace mlrfe

#pragma once

// Local solver for cell subproblems: sequential linear programming with a
// box trust region and an exact l1 penalty on constraint violation.

#include <span>
#include <vector>

#include "mlrfe/relax.hpp"

namespace mlrfe {

/// Value of a cell term at x (inputs are mapped to the unit cube, unclamped).
double term_value(const CellTerm& term, std::span<const double> x);

/// Partial derivatives of term_value with respect to the input variables.
std::vector<double> term_gradient(const CellTerm& term, std::span<const double> x);

double nlp_objective(const BoxNlp& nlp, std::span<const double> x);

/// Largest scaled violation of bounds, rows and cell terms. Row residuals are
/// divided by max(1, |rhs|, max |a_i x_i|), term residuals by max(1, |f|).
double nlp_violation(const BoxNlp& nlp, std::span<const double> x);

struct LocalOptions {
  int max_iterations = 60;
  double feas_tol = 1e-7;
  double initial_radius = 0.25;  // fraction of each variable's range
};

struct LocalResult {
  bool feasible = false;
  std::vector<double> x;
  double objective = kInf;
  double violation = kInf;
};

/// Starts from `start` (clamped into the bounds, outputs re-evaluated) and
/// returns the last accepted iterate.
LocalResult local_solve(const BoxNlp& nlp, std::vector<double> start, const LocalOptions& options = {});

}  // namespace mlrfe

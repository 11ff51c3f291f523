#pragma once

// Alternates between the MILP relaxation, a global
// solve of the cell it points to, and a no-good cut removing that cell.

#include <cstddef>
#include <vector>

#include "mlrfe/bnb.hpp"
#include "mlrfe/relax.hpp"
#include "mlrfe/spatial.hpp"

namespace mlrfe {

enum class RfeStatus { Optimal, Infeasible, Unbounded, TimeLimit };
const char* to_string(RfeStatus status);

struct RfeOptions {
  double abs_tol = 1e-6;
  double rel_tol = 1e-6;
  double time_limit = kInf;  // seconds
  std::size_t max_iterations = 1'000'000;
  MipOptions mip;
  NlpOptions nlp;
};

struct RfeIteration {
  double milp_bound = -kInf;  // bound returned by this MILP solve
  double dual_bound = -kInf;  // best bound so far
  NlpStatus nlp_status = NlpStatus::Infeasible;
  double nlp_objective = kInf;
  double incumbent = kInf;
  Fixing fixing;
  double seconds = 0.0;  // since the start of the run
};

/// Objectives are in the internal minimisation sense of the ProblemIR.
struct RfeResult {
  RfeStatus status = RfeStatus::Infeasible;
  std::vector<double> x;
  double objective = kInf;
  double bound = -kInf;
  std::vector<RfeIteration> trace;
  std::size_t cuts = 0;
  double seconds = 0.0;
};

RfeResult solve_rfe(const ProblemIR& ir, const RfeOptions& options = {});

}  // namespace mlrfe

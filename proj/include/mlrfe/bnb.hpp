#pragma once

// LP-based branch-and-bound over binary columns.

#include <cstddef>
#include <span>
#include <vector>

#include "mlrfe/simplex.hpp"

namespace mlrfe {

enum class MipStatus { Optimal, Infeasible, Unbounded, GapLimit, TimeLimit, NodeLimit };
const char* to_string(MipStatus status);

struct MipOptions {
  double integrality_tol = 1e-6;
  double abs_gap = 1e-6;
  double rel_gap = 1e-6;
  double time_limit = kInf;  // seconds
  std::size_t node_limit = 1'000'000;
  LpOptions lp;
};

struct MipResult {
  MipStatus status = MipStatus::Infeasible;
  std::vector<double> x;
  double objective = kInf;
  double bound = -kInf;
  std::size_t nodes = 0;

  bool has_solution() const { return !x.empty(); }
};

/// Minimises lp with the listed columns restricted to {0, 1}. Nodes are
/// explored best-first on the parent LP bound, ties broken by creation order;
/// the branching column is the most fractional one, lowest index on ties.
MipResult solve_milp(const LpProblem& lp, std::span<const int> binaries, const MipOptions& options = {});

}  // namespace mlrfe

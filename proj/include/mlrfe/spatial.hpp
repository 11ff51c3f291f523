#pragma once

// Spatial branch-and-bound for cell subproblems and the enumeration oracle
// over every cell and binary assignment.

#include <array>
#include <cstddef>
#include <vector>

#include "mlrfe/local_search.hpp"
#include "mlrfe/relax.hpp"

namespace mlrfe {

/// w >= cu*u + cv*v + c (lower) or w <= cu*u + cv*v + c (upper).
struct McPlane {
  double cu = 0.0;
  double cv = 0.0;
  double c = 0.0;

  double at(double u, double v) const { return cu * u + cv * v + c; }
};

/// Convex and concave envelope of w = u*v over a box.
struct McEnvelope {
  double ul = 0.0, uu = 0.0, vl = 0.0, vu = 0.0;
  std::array<McPlane, 2> lower;
  std::array<McPlane, 2> upper;

  double under(double u, double v) const;
  double over(double u, double v) const;
};

McEnvelope mccormick_envelope(double ul, double uu, double vl, double vu);

enum class NlpStatus { Optimal, Infeasible, Unbounded, IterationLimit };
const char* to_string(NlpStatus status);

struct NlpOptions {
  double abs_gap = 1e-6;
  double rel_gap = 1e-6;
  double feas_tol = 1e-7;
  double min_width = 1e-9;  // in unit-cube coordinates
  std::size_t node_limit = 200000;
  double time_limit = kInf;
  LocalOptions local;
};

struct NlpResult {
  NlpStatus status = NlpStatus::Infeasible;
  std::vector<double> x;
  double objective = kInf;
  double lower_bound = kInf;
  std::size_t nodes = 0;
};

/// Globally minimises a cell subproblem. Each cell term is rewritten over its
/// unit cube as a chain of bilinear products, prefix weights times (1 - theta)
/// or theta, left to right in axis order, relaxed with McCormick envelopes on
/// the node box. Nodes are processed best-first and split at the midpoint of
/// the widest unit-cube interval.
NlpResult solve_box_global(const BoxNlp& nlp, const NlpOptions& options = {});

/// Every fixing: all cells of active interpolants for every binary assignment.
std::vector<Fixing> enumerate_fixings(const ProblemIR& ir);

struct OracleOptions {
  NlpOptions nlp;
  std::size_t max_fixings = 10000;
  /// Wall-clock budget for the whole enumeration, seconds. Subproblems not
  /// started in time count as unsolved and leave the status IterationLimit.
  double time_limit = kInf;
};

struct OracleResult {
  NlpResult best;
  Fixing fixing;  // where the best point lives
  std::size_t subproblems = 0;
};

/// Best solution over all fixings, solved in parallel with OpenMP.
/// Throws EnumerationTooLarge when fixing_count exceeds the limit.
OracleResult enumerate_oracle(const ProblemIR& ir, const OracleOptions& options = {});

/// Single-threaded reference for enumerate_oracle.
OracleResult enumerate_oracle_serial(const ProblemIR& ir, const OracleOptions& options = {});

}  // namespace mlrfe

#pragma once

// Run reports for single solves and batch summaries, as JSON and plain text.
// Objective and bound are in the sense the user stated.

#include <cstddef>
#include <string>
#include <vector>

#include "mlrfe/rfe.hpp"
#include "mlrfe/spatial.hpp"

namespace mlrfe {

/// Process exit codes of the command-line tool.
enum ExitCode : int {
  kExitOptimal = 0,
  kExitError = 1,  // unexpected failure
  kExitInvalid = 2,
  kExitInfeasible = 3,
  kExitLimit = 4,
  kExitUnbounded = 5,
};

struct TracePoint {
  std::size_t iteration = 0;
  double seconds = 0.0;
  double milp_bound = 0.0;
  double dual_bound = 0.0;
  double incumbent = 0.0;
  std::string nlp_status;
  std::string fixing;
};

struct RunReport {
  std::string solver;
  std::string instance;
  std::string status;  // Optimal, Infeasible, Unbounded, TimeLimit, IterationLimit
  double objective = 0.0;
  double bound = 0.0;
  double gap = 0.0;  // infinite unless objective and bound are both finite
  std::size_t iterations = 0;  // RFE iterations, or subproblems for the oracle
  std::size_t nodes = 0;       // spatial branch-and-bound nodes (oracle)
  std::size_t cuts = 0;        // no-good cuts added (RFE)
  double seconds = 0.0;
  std::vector<std::string> names;
  std::vector<double> x;  // empty without a solution
  std::vector<TracePoint> trace;
};

/// (C - Cbar) / max(1, |C|) for an incumbent C and bound Cbar of a
/// minimisation, clamped at zero; infinite when either is not finite.
double relative_gap(double incumbent, double bound);

RunReport make_report(const ProblemIR& ir, const RfeResult& result);
RunReport make_report(const ProblemIR& ir, const OracleResult& result, double seconds);

int exit_code(const RunReport& report);

std::string to_json(const RunReport& report);
std::string to_text(const RunReport& report);

/// One instance solved by both engines.
struct BatchRow {
  std::string instance;
  RunReport rfe;
  RunReport oracle;
  std::string error;  // set when the instance could not be solved

  /// Both Optimal with objectives within 1e-6 absolute or relative, or the
  /// same terminal status otherwise.
  bool engines_agree() const;
};

struct BatchSummary {
  std::vector<BatchRow> rows;
  double mean_rfe_seconds = 0.0;
  double mean_oracle_seconds = 0.0;
  double mean_rfe_gap = 0.0;  // over rows with a finite gap
  std::size_t solved = 0;     // rows where RFE reached Optimal
  std::size_t agreeing = 0;
};

BatchSummary summarize(std::vector<BatchRow> rows);
std::string to_json(const BatchSummary& summary);
std::string to_text(const BatchSummary& summary);

}  // namespace mlrfe

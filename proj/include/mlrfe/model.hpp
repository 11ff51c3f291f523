#pragma once

// Intermediate representation of a mixed-integer program whose nonlinear
// terms are multilinear interpolants of look-up tables.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "mlrfe/error.hpp"
#include "mlrfe/gridtab.hpp"

namespace mlrfe {

enum class VarKind { Continuous, Binary };
enum class RowSense { Le, Eq, Ge };
enum class ObjectiveSense { Minimize, Maximize };

const char* to_string(RowSense sense);

struct Variable {
  std::string name;
  VarKind kind = VarKind::Continuous;
  double lo = 0.0;
  double hi = 0.0;
};

struct LinTerm {
  double coef;
  int var;
};

struct LinConstraint {
  std::string name;
  std::vector<LinTerm> terms;
  RowSense sense = RowSense::Le;
  double rhs = 0.0;
};

/// One tabulated function and the variable holding its interpolated value.
struct InterpolantOutput {
  LookupTable table;
  int var = -1;
};

/// Multilinear interpolation of one or more tables that share a grid and the
/// same input variables. All outputs share one set of interpolation weights.
/// With an activation binary the weights sum to that binary instead of one,
/// so inputs and outputs collapse to zero when it is off.
struct InterpolantDef {
  std::string name;
  std::vector<int> inputs;
  std::vector<InterpolantOutput> outputs;
  std::optional<int> activation;

  const Grid& grid() const { return outputs.front().table.grid; }
};

struct Objective {
  std::vector<LinTerm> terms;
  double constant = 0.0;
};

struct ProblemDescription {
  std::vector<Variable> variables;
  std::vector<LinConstraint> constraints;
  std::vector<InterpolantDef> interpolants;
  Objective objective;
  ObjectiveSense sense = ObjectiveSense::Minimize;
};

/// Validated problem, always in minimisation form. `negated` records that the
/// original objective was maximised and has been multiplied by -1.
struct ProblemIR {
  std::vector<Variable> variables;
  std::vector<LinConstraint> constraints;
  std::vector<InterpolantDef> interpolants;
  Objective objective;
  bool negated = false;

  std::size_t num_continuous() const;
  std::size_t num_binaries() const;
  std::size_t num_rows() const { return constraints.size(); }
  std::vector<int> binary_ids() const;
  int find_variable(const std::string& name) const;

  /// Objective value in the sense the user stated.
  double user_objective(double internal) const { return negated ? -internal : internal; }
  double objective_value(const std::vector<double>& x) const;
};

/// Assembles a ProblemDescription incrementally.
class ProblemBuilder {
 public:
  int add_continuous(std::string name, double lo, double hi);
  int add_binary(std::string name);
  void add_constraint(std::string name, std::vector<LinTerm> terms, RowSense sense, double rhs);
  void add_interpolant(std::string name, std::vector<int> inputs,
                       std::vector<InterpolantOutput> outputs,
                       std::optional<int> activation = std::nullopt);
  void minimize(std::vector<LinTerm> terms, double constant = 0.0);
  void maximize(std::vector<LinTerm> terms, double constant = 0.0);

  const ProblemDescription& description() const { return desc_; }
  ProblemIR build() const;

 private:
  ProblemDescription desc_;
};

struct Violation {
  ErrorCode code;
  std::string message;
};

/// Checks every structural invariant; empty when the IR is valid.
std::vector<Violation> validate(const ProblemIR& ir);

/// Validates, flips maximisation into minimisation, throws the first violation.
ProblemIR build_problem(ProblemDescription desc);

/// Size of the MILP relaxation the relax module builds for this problem.
struct ProblemSize {
  std::size_t continuous = 0;   // n
  std::size_t constraints = 0;  // m
  std::size_t binaries = 0;     // |y|
  std::size_t xi = 0;
  std::size_t lambda = 0;
  std::size_t segments = 0;
  std::size_t rows = 0;
  std::size_t columns = 0;
  std::size_t nonzeros = 0;
};

ProblemSize problem_size(const ProblemIR& ir);

/// Largest absolute violation of the linear rows and bounds at x (binaries
/// are checked for integrality as well).
double linear_violation(const ProblemIR& ir, const std::vector<double>& x);

/// Largest |output - interpolant(inputs)| at x, honouring activation.
double interpolant_violation(const ProblemIR& ir, const std::vector<double>& x);

/// Worst violation with each row divided by max(1, |rhs|, max_i |a_i x_i|),
/// each bound by max(1, |bound|) and each interpolant by max(1, |value|).
/// This is the measure the solvers' feasibility tolerance refers to.
double scaled_violation(const ProblemIR& ir, const std::vector<double>& x);

}  // namespace mlrfe

#pragma once

// MILP relaxation over interpolation weights, fixings of one grid cell per
// interpolant, the resulting box-constrained subproblems and no-good cuts.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "mlrfe/bnb.hpp"
#include "mlrfe/model.hpp"
#include "mlrfe/simplex.hpp"

namespace mlrfe {

struct AxisColumns {
  int xi = 0;       // first of axis_size weight columns
  int segment = 0;  // first of axis_size - 1 segment binaries
  std::size_t size = 0;
};

struct InterpolantColumns {
  std::vector<AxisColumns> axes;
  int lambda = 0;  // first of grid.num_points() corner weight columns
  std::size_t lambda_count = 0;
};

/// Columns 0..num_vars-1 are the problem variables in declaration order.
struct MilpModel {
  LpProblem lp;
  std::vector<int> binaries;
  std::vector<bool> is_binary;
  std::vector<InterpolantColumns> interp;
  std::vector<std::string> column_names;
  std::vector<std::string> row_names;
  std::size_t num_vars = 0;
  std::size_t base_rows = 0;

  std::size_t num_cuts() const { return lp.num_rows() - base_rows; }
};

MilpModel build_relaxation(const ProblemIR& ir);

MipResult solve_relaxation(const MilpModel& milp, const MipOptions& options = {});

/// One segment per interpolant axis (kInactive for switched-off
/// interpolants) plus the value of every binary in ProblemIR::binary_ids order.
struct Fixing {
  static constexpr int kInactive = -1;
  std::vector<std::vector<int>> segments;
  std::vector<int> binaries;

  auto operator<=>(const Fixing&) const = default;
};

std::string describe(const Fixing& fixing);

/// Smallest t with every weight above `threshold` inside {t, t+1}.
/// Throws NoValidSegment when the support is not two consecutive points.
std::size_t canonical_segment(std::span<const double> xi, double threshold = 1e-9);

/// Reads the cell chosen by the segment binaries of a MILP solution and the
/// binary assignment. Throws NoValidSegment when the weights of an axis
/// spread outside the chosen segment.
Fixing extract_fixing(const ProblemIR& ir, const MilpModel& milp, std::span<const double> x);

/// Number of distinct fixings: product of segment counts over interpolant
/// axes times 2^binaries. Saturates at SIZE_MAX.
std::size_t fixing_count(const ProblemIR& ir);

/// One interpolant output restricted to a cell, written over the unit cube.
struct CellTerm {
  std::vector<int> inputs;
  std::vector<double> lo;  // cell breakpoints per axis
  std::vector<double> hi;
  std::vector<double> corners;  // 2^n values, bit j (MSB first) selects hi
  int output = -1;
};

/// The problem with every binary fixed and every active interpolant confined
/// to one cell. Variables keep the indices of the ProblemIR.
struct BoxNlp {
  std::vector<double> lo;
  std::vector<double> hi;
  std::vector<LinConstraint> rows;
  std::vector<CellTerm> terms;
  Objective objective;
  /// Set when bound intersection already proves the box empty.
  bool empty = false;
};

BoxNlp build_subproblem(const ProblemIR& ir, const Fixing& fixing);

/// Appends sum(1 - s) + sum_{y=1}(1 - y) + sum_{y=0} y >= 1 over the chosen
/// segment binaries of active interpolants and all binaries. Returns the row.
int add_no_good_cut(MilpModel& milp, const ProblemIR& ir, const Fixing& fixing);

}  // namespace mlrfe

#pragma once

// Rectangular breakpoint grids, look-up tables and exact multilinear
// interpolation over them.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace mlrfe {

/// Relative distance outside an axis hull that is still clamped onto it.
inline constexpr double kHullClampTol = 1e-9;

/// Axis-aligned breakpoint grid B_1 x ... x B_n. Immutable once built.
class Grid {
 public:
  Grid() = default;

  std::size_t dims() const { return axes_.size(); }
  const std::vector<std::vector<double>>& axes() const { return axes_; }
  const std::vector<double>& axis(std::size_t j) const { return axes_[j]; }
  std::size_t axis_size(std::size_t j) const { return axes_[j].size(); }
  std::size_t segments(std::size_t j) const { return axes_[j].size() - 1; }

  /// Number of breakpoints, i.e. the product of axis sizes.
  std::size_t num_points() const;
  /// Number of hyperrectangular cells.
  std::size_t num_cells() const;
  /// Sum of axis sizes.
  std::size_t sum_axis_sizes() const;

  /// Lexicographic position of a multi-index, last dimension fastest.
  std::size_t flat_index(std::span<const std::size_t> multi) const;
  std::vector<std::size_t> multi_index(std::size_t flat) const;
  std::size_t stride(std::size_t j) const { return strides_[j]; }

  bool operator==(const Grid& other) const { return axes_ == other.axes_; }

 private:
  friend Grid make_grid(std::vector<std::vector<double>> axes);
  std::vector<std::vector<double>> axes_;
  std::vector<std::size_t> strides_;
};

/// Validates and builds a grid. Throws AxisTooShort / NotStrictlyIncreasing.
Grid make_grid(std::vector<std::vector<double>> axes);

/// Samples of a black-box function on every breakpoint of a grid, stored
/// lexicographically with the last dimension varying fastest.
struct LookupTable {
  Grid grid;
  std::vector<double> values;

  double at(std::span<const std::size_t> multi) const { return values[grid.flat_index(multi)]; }
};

/// Throws InvalidTable when the value count or finiteness is wrong.
LookupTable make_table(Grid grid, std::vector<double> values);

/// Empty string when the table is consistent, otherwise a diagnostic.
std::string check_table(const LookupTable& table);

/// One segment index per axis; identifies a hyperrectangle of the grid.
struct CellIndex {
  std::vector<std::size_t> t;
  bool operator==(const CellIndex&) const = default;
};

/// Segment containing x on a sorted axis. Ties at an interior breakpoint go
/// to the cell on its right, the last breakpoint belongs to the last segment.
/// Throws OutOfHull beyond the clamp tolerance.
std::size_t locate_segment(std::span<const double> axis, double x);

/// 1-D convex-combination weights of x over the axis breakpoints.
std::vector<double> weights_1d(std::span<const double> axis, double x);

CellIndex locate_cell(const Grid& grid, std::span<const double> x);

struct WeightedCorner {
  std::size_t flat;
  double weight;
};

/// Nonzero interpolation weights lambda_k = prod_j xi^j_{k_j}.
std::vector<WeightedCorner> lambda_weights(const Grid& grid, std::span<const double> x);

/// Product-sum evaluation sum_k lambda_k f(x^k).
double interpolate(const LookupTable& table, std::span<const double> x);

/// Evaluation by collapsing one axis at a time with 1-D linear interpolation.
double interpolate_recursive(const LookupTable& table, std::span<const double> x);

/// Table of prod_{j in monomial} x_j sampled on the grid.
LookupTable product_table(const Grid& grid, std::span<const std::size_t> monomial);

/// The 2^n corner values of one cell, corner bit j (MSB first) selecting the
/// upper breakpoint of axis j.
std::vector<double> cell_corner_values(const LookupTable& table, const CellIndex& cell);

/// Multilinear form over the unit cube given its corner values.
double multilinear_eval(std::span<const double> corners, std::span<const double> theta);

/// Partial derivatives of multilinear_eval with respect to theta.
std::vector<double> multilinear_gradient(std::span<const double> corners,
                                         std::span<const double> theta);

/// Batched interpolation: `points` holds one row of table.grid.dims() values
/// per point. Parallelised over points with OpenMP.
std::vector<double> interpolate_batch(const LookupTable& table, std::span<const double> points);

/// Single-threaded reference for interpolate_batch.
std::vector<double> interpolate_batch_serial(const LookupTable& table,
                                             std::span<const double> points);

}  // namespace mlrfe

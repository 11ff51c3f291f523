#include "mlrfe/gridtab.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "mlrfe/error.hpp"

namespace mlrfe {

std::size_t Grid::num_points() const {
  std::size_t n = axes_.empty() ? 0 : 1;
  for (const auto& a : axes_) n *= a.size();
  return n;
}

std::size_t Grid::num_cells() const {
  std::size_t n = axes_.empty() ? 0 : 1;
  for (const auto& a : axes_) n *= a.size() - 1;
  return n;
}

std::size_t Grid::sum_axis_sizes() const {
  std::size_t n = 0;
  for (const auto& a : axes_) n += a.size();
  return n;
}

std::size_t Grid::flat_index(std::span<const std::size_t> multi) const {
  std::size_t flat = 0;
  for (std::size_t j = 0; j < axes_.size(); ++j) flat += multi[j] * strides_[j];
  return flat;
}

std::vector<std::size_t> Grid::multi_index(std::size_t flat) const {
  std::vector<std::size_t> multi(axes_.size());
  for (std::size_t j = 0; j < axes_.size(); ++j) {
    multi[j] = flat / strides_[j];
    flat %= strides_[j];
  }
  return multi;
}

Grid make_grid(std::vector<std::vector<double>> axes) {
  if (axes.empty()) throw Error(ErrorCode::AxisTooShort, "grid needs at least one axis");
  for (std::size_t j = 0; j < axes.size(); ++j) {
    const auto& a = axes[j];
    if (a.size() < 2) {
      throw Error(ErrorCode::AxisTooShort,
                  "axis " + std::to_string(j) + " has fewer than 2 breakpoints");
    }
    for (std::size_t k = 0; k < a.size(); ++k) {
      if (!std::isfinite(a[k])) {
        throw Error(ErrorCode::NotStrictlyIncreasing,
                    "axis " + std::to_string(j) + " has a non-finite breakpoint");
      }
      if (k == 0) continue;
      const double scale = std::max({1.0, std::abs(a[k]), std::abs(a[k - 1])});
      if (!(a[k] - a[k - 1] > 1e-12 * scale)) {
        throw Error(ErrorCode::NotStrictlyIncreasing,
                    "axis " + std::to_string(j) + " breakpoints not strictly increasing at " +
                        std::to_string(k));
      }
    }
  }
  Grid g;
  g.axes_ = std::move(axes);
  g.strides_.assign(g.axes_.size(), 1);
  for (std::size_t j = g.axes_.size() - 1; j > 0; --j) {
    g.strides_[j - 1] = g.strides_[j] * g.axes_[j].size();
  }
  return g;
}

std::string check_table(const LookupTable& table) {
  if (table.grid.dims() == 0) return "table has no grid";
  if (table.values.size() != table.grid.num_points()) {
    std::ostringstream os;
    os << "table holds " << table.values.size() << " values, grid has "
       << table.grid.num_points() << " breakpoints";
    return os.str();
  }
  for (std::size_t i = 0; i < table.values.size(); ++i) {
    if (!std::isfinite(table.values[i])) return "non-finite value at position " + std::to_string(i);
  }
  return {};
}

LookupTable make_table(Grid grid, std::vector<double> values) {
  LookupTable t{std::move(grid), std::move(values)};
  if (auto msg = check_table(t); !msg.empty()) throw Error(ErrorCode::InvalidTable, msg);
  return t;
}

namespace {

double clamp_into_axis(std::span<const double> axis, double x) {
  const double lo = axis.front();
  const double hi = axis.back();
  const double tol = kHullClampTol * (hi - lo);
  if (x < lo) {
    if (lo - x > tol) {
      throw Error(ErrorCode::OutOfHull, std::to_string(x) + " below axis minimum " +
                                            std::to_string(lo));
    }
    return lo;
  }
  if (x > hi) {
    if (x - hi > tol) {
      throw Error(ErrorCode::OutOfHull, std::to_string(x) + " above axis maximum " +
                                            std::to_string(hi));
    }
    return hi;
  }
  return x;
}

// Segment t and the weight of its upper breakpoint.
struct Bracket {
  std::size_t t;
  double upper;
};

Bracket bracket(std::span<const double> axis, double x) {
  x = clamp_into_axis(axis, x);
  const std::size_t t = locate_segment(axis, x);
  const double w = (x - axis[t]) / (axis[t + 1] - axis[t]);
  return {t, std::clamp(w, 0.0, 1.0)};
}

void check_dims(const Grid& grid, std::span<const double> x) {
  if (x.size() != grid.dims()) {
    throw Error(ErrorCode::DimensionMismatch, "point has " + std::to_string(x.size()) +
                                                  " coordinates, grid has " +
                                                  std::to_string(grid.dims()) + " axes");
  }
}

}  // namespace

std::size_t locate_segment(std::span<const double> axis, double x) {
  x = clamp_into_axis(axis, x);
  // first breakpoint strictly greater than x
  auto it = std::upper_bound(axis.begin(), axis.end(), x);
  std::size_t k = static_cast<std::size_t>(it - axis.begin());
  if (k == 0) return 0;
  return std::min(k - 1, axis.size() - 2);
}

std::vector<double> weights_1d(std::span<const double> axis, double x) {
  const auto b = bracket(axis, x);
  std::vector<double> xi(axis.size(), 0.0);
  xi[b.t] = 1.0 - b.upper;
  xi[b.t + 1] = b.upper;
  return xi;
}

CellIndex locate_cell(const Grid& grid, std::span<const double> x) {
  check_dims(grid, x);
  CellIndex c;
  c.t.resize(grid.dims());
  for (std::size_t j = 0; j < grid.dims(); ++j) c.t[j] = locate_segment(grid.axis(j), x[j]);
  return c;
}

std::vector<WeightedCorner> lambda_weights(const Grid& grid, std::span<const double> x) {
  check_dims(grid, x);
  const std::size_t n = grid.dims();
  std::vector<Bracket> br(n);
  for (std::size_t j = 0; j < n; ++j) br[j] = bracket(grid.axis(j), x[j]);

  std::vector<WeightedCorner> out;
  out.reserve(std::size_t{1} << n);
  for (std::size_t c = 0; c < (std::size_t{1} << n); ++c) {
    double w = 1.0;
    std::size_t flat = 0;
    for (std::size_t j = 0; j < n; ++j) {
      const bool up = (c >> (n - 1 - j)) & 1u;
      w *= up ? br[j].upper : 1.0 - br[j].upper;
      flat += (br[j].t + (up ? 1 : 0)) * grid.stride(j);
    }
    if (w > 0.0) out.push_back({flat, w});
  }
  return out;
}

double interpolate(const LookupTable& table, std::span<const double> x) {
  double f = 0.0;
  for (const auto& wc : lambda_weights(table.grid, x)) f += wc.weight * table.values[wc.flat];
  return f;
}

double interpolate_recursive(const LookupTable& table, std::span<const double> x) {
  const Grid& g = table.grid;
  check_dims(g, x);
  const std::size_t n = g.dims();
  CellIndex cell;
  std::vector<double> upper(n);
  for (std::size_t j = 0; j < n; ++j) {
    const auto b = bracket(g.axis(j), x[j]);
    cell.t.push_back(b.t);
    upper[j] = b.upper;
  }
  // Collapse the last axis first: pairs of adjacent corners differ in it.
  std::vector<double> level = cell_corner_values(table, cell);
  for (std::size_t j = n; j-- > 0;) {
    std::vector<double> next(level.size() / 2);
    for (std::size_t i = 0; i < next.size(); ++i) {
      const double f0 = level[2 * i];
      const double f1 = level[2 * i + 1];
      const double lo = g.axis(j)[cell.t[j]];
      const double hi = g.axis(j)[cell.t[j] + 1];
      const double xj = lo + upper[j] * (hi - lo);
      next[i] = (hi - xj) / (hi - lo) * f0 + (xj - lo) / (hi - lo) * f1;
    }
    level = std::move(next);
  }
  return level.front();
}

LookupTable product_table(const Grid& grid, std::span<const std::size_t> monomial) {
  if (monomial.empty()) throw Error(ErrorCode::InvalidTable, "empty monomial");
  for (std::size_t a = 0; a < monomial.size(); ++a) {
    if (monomial[a] >= grid.dims()) {
      throw Error(ErrorCode::DimensionMismatch, "monomial references a missing axis");
    }
    for (std::size_t b = 0; b < a; ++b) {
      if (monomial[a] == monomial[b]) {
        throw Error(ErrorCode::InvalidTable, "monomial repeats a dimension");
      }
    }
  }
  std::vector<double> values(grid.num_points());
  for (std::size_t flat = 0; flat < values.size(); ++flat) {
    const auto multi = grid.multi_index(flat);
    double v = 1.0;
    for (auto j : monomial) v *= grid.axis(j)[multi[j]];
    values[flat] = v;
  }
  return make_table(grid, std::move(values));
}

std::vector<double> cell_corner_values(const LookupTable& table, const CellIndex& cell) {
  const Grid& g = table.grid;
  const std::size_t n = g.dims();
  std::vector<double> out(std::size_t{1} << n);
  for (std::size_t c = 0; c < out.size(); ++c) {
    std::size_t flat = 0;
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t up = (c >> (n - 1 - j)) & 1u;
      flat += (cell.t[j] + up) * g.stride(j);
    }
    out[c] = table.values[flat];
  }
  return out;
}

double multilinear_eval(std::span<const double> corners, std::span<const double> theta) {
  const std::size_t n = theta.size();
  double f = 0.0;
  for (std::size_t c = 0; c < corners.size(); ++c) {
    double w = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
      const bool up = (c >> (n - 1 - j)) & 1u;
      w *= up ? theta[j] : 1.0 - theta[j];
    }
    f += w * corners[c];
  }
  return f;
}

std::vector<double> multilinear_gradient(std::span<const double> corners,
                                         std::span<const double> theta) {
  const std::size_t n = theta.size();
  std::vector<double> grad(n, 0.0);
  for (std::size_t c = 0; c < corners.size(); ++c) {
    for (std::size_t d = 0; d < n; ++d) {
      double w = 1.0;
      for (std::size_t j = 0; j < n; ++j) {
        const bool up = (c >> (n - 1 - j)) & 1u;
        if (j == d) {
          w *= up ? 1.0 : -1.0;
        } else {
          w *= up ? theta[j] : 1.0 - theta[j];
        }
      }
      grad[d] += w * corners[c];
    }
  }
  return grad;
}

std::vector<double> interpolate_batch(const LookupTable& table, std::span<const double> points) {
  const std::size_t n = table.grid.dims();
  const std::size_t count = points.size() / n;
  std::vector<double> out(count);
  const auto npts = static_cast<long long>(count);
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < npts; ++i) {
    out[i] = interpolate(table, points.subspan(static_cast<std::size_t>(i) * n, n));
  }
  return out;
}

std::vector<double> interpolate_batch_serial(const LookupTable& table,
                                             std::span<const double> points) {
  const std::size_t n = table.grid.dims();
  const std::size_t count = points.size() / n;
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = interpolate(table, points.subspan(i * n, n));
  return out;
}

}  // namespace mlrfe

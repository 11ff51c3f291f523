#include "mlrfe/relax.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mlrfe/error.hpp"

namespace mlrfe {

namespace {

std::string sanitize(const std::string& s) {
  std::string out = s;
  for (char& c : out) {
    if (c == ' ' || c == '\t' || c == ':' || c == '[' || c == ']' || c == '<' || c == '>' ||
        c == '=' || c == '+' || c == '-' || c == '*' || c == '/' || c == '^') {
      c = '_';
    }
  }
  return out;
}

}  // namespace

MilpModel build_relaxation(const ProblemIR& ir) {
  MilpModel m;
  m.num_vars = ir.variables.size();
  for (const auto& v : ir.variables) {
    const int c = m.lp.add_column(v.lo, v.hi);
    m.column_names.push_back(sanitize(v.name));
    m.is_binary.push_back(v.kind == VarKind::Binary);
    if (v.kind == VarKind::Binary) m.binaries.push_back(c);
  }
  for (const auto& t : ir.objective.terms) m.lp.cost[t.var] += t.coef;
  m.lp.cost_offset = ir.objective.constant;

  auto add_col = [&](double lo, double hi, std::string name, bool binary) {
    const int c = m.lp.add_column(lo, hi);
    m.column_names.push_back(std::move(name));
    m.is_binary.push_back(binary);
    if (binary) m.binaries.push_back(c);
    return c;
  };

  for (std::size_t i = 0; i < ir.interpolants.size(); ++i) {
    const auto& f = ir.interpolants[i];
    const Grid& g = f.grid();
    const std::string tag = sanitize(f.name.empty() ? "f" + std::to_string(i) : f.name);
    InterpolantColumns ic;
    ic.axes.resize(g.dims());
    for (std::size_t j = 0; j < g.dims(); ++j) {
      ic.axes[j].size = g.axis_size(j);
      ic.axes[j].xi = static_cast<int>(m.lp.num_cols());
      for (std::size_t k = 0; k < g.axis_size(j); ++k) {
        add_col(0, 1, "xi_" + tag + "_" + std::to_string(j) + "_" + std::to_string(k), false);
      }
    }
    ic.lambda = static_cast<int>(m.lp.num_cols());
    ic.lambda_count = g.num_points();
    for (std::size_t k = 0; k < g.num_points(); ++k) {
      add_col(0, 1, "lam_" + tag + "_" + std::to_string(k), false);
    }
    for (std::size_t j = 0; j < g.dims(); ++j) {
      ic.axes[j].segment = static_cast<int>(m.lp.num_cols());
      for (std::size_t t = 0; t + 1 < g.axis_size(j); ++t) {
        add_col(0, 1, "s_" + tag + "_" + std::to_string(j) + "_" + std::to_string(t), true);
      }
    }
    m.interp.push_back(std::move(ic));
  }

  for (const auto& row : ir.constraints) {
    std::vector<int> idx;
    std::vector<double> val;
    for (const auto& t : row.terms) {
      idx.push_back(t.var);
      val.push_back(t.coef);
    }
    m.lp.add_row(idx, val, row.sense, row.rhs);
    m.row_names.push_back(sanitize(row.name));
  }

  for (std::size_t i = 0; i < ir.interpolants.size(); ++i) {
    const auto& f = ir.interpolants[i];
    const Grid& g = f.grid();
    const auto& ic = m.interp[i];
    const std::string tag = sanitize(f.name.empty() ? "f" + std::to_string(i) : f.name);
    for (std::size_t j = 0; j < g.dims(); ++j) {
      const auto& ax = ic.axes[j];
      const std::size_t k = ax.size;
      const std::string aj = tag + "_" + std::to_string(j);

      std::vector<int> idx{f.inputs[j]};
      std::vector<double> val{1.0};
      for (std::size_t p = 0; p < k; ++p) {
        idx.push_back(ax.xi + static_cast<int>(p));
        val.push_back(-g.axis(j)[p]);
      }
      m.lp.add_row(idx, val, RowSense::Eq, 0.0);
      m.row_names.push_back("link_" + aj);

      idx.clear();
      val.clear();
      for (std::size_t p = 0; p < k; ++p) {
        idx.push_back(ax.xi + static_cast<int>(p));
        val.push_back(1.0);
      }
      if (f.activation) {
        idx.push_back(*f.activation);
        val.push_back(-1.0);
      }
      m.lp.add_row(idx, val, RowSense::Eq, f.activation ? 0.0 : 1.0);
      m.row_names.push_back("conv_" + aj);

      for (std::size_t p = 0; p < k; ++p) {
        idx.assign({ax.xi + static_cast<int>(p)});
        val.assign({1.0});
        for (std::size_t flat = 0; flat < g.num_points(); ++flat) {
          if ((flat / g.stride(j)) % k != p) continue;
          idx.push_back(ic.lambda + static_cast<int>(flat));
          val.push_back(-1.0);
        }
        m.lp.add_row(idx, val, RowSense::Eq, 0.0);
        m.row_names.push_back("marg_" + aj + "_" + std::to_string(p));
      }

      idx.clear();
      val.clear();
      for (std::size_t t = 0; t + 1 < k; ++t) {
        idx.push_back(ax.segment + static_cast<int>(t));
        val.push_back(1.0);
      }
      if (f.activation) {
        idx.push_back(*f.activation);
        val.push_back(-1.0);
      }
      m.lp.add_row(idx, val, RowSense::Eq, f.activation ? 0.0 : 1.0);
      m.row_names.push_back("seg_" + aj);

      for (std::size_t p = 0; p < k; ++p) {
        idx.assign({ax.xi + static_cast<int>(p)});
        val.assign({1.0});
        if (p > 0) {
          idx.push_back(ax.segment + static_cast<int>(p - 1));
          val.push_back(-1.0);
        }
        if (p + 1 < k) {
          idx.push_back(ax.segment + static_cast<int>(p));
          val.push_back(-1.0);
        }
        m.lp.add_row(idx, val, RowSense::Le, 0.0);
        m.row_names.push_back("sos2_" + aj + "_" + std::to_string(p));
      }
    }
    for (std::size_t o = 0; o < f.outputs.size(); ++o) {
      const auto& out = f.outputs[o];
      std::vector<int> idx{out.var};
      std::vector<double> val{1.0};
      for (std::size_t flat = 0; flat < g.num_points(); ++flat) {
        idx.push_back(ic.lambda + static_cast<int>(flat));
        val.push_back(-out.table.values[flat]);
      }
      m.lp.add_row(idx, val, RowSense::Eq, 0.0);
      m.row_names.push_back("out_" + tag + "_" + std::to_string(o));
    }
  }
  m.base_rows = m.lp.num_rows();
  return m;
}

MipResult solve_relaxation(const MilpModel& milp, const MipOptions& options) {
  return solve_milp(milp.lp, milp.binaries, options);
}

std::string describe(const Fixing& fixing) {
  std::ostringstream os;
  os << "cells[";
  for (std::size_t i = 0; i < fixing.segments.size(); ++i) {
    if (i) os << ' ';
    os << '(';
    for (std::size_t j = 0; j < fixing.segments[i].size(); ++j) {
      if (j) os << ',';
      if (fixing.segments[i][j] == Fixing::kInactive) {
        os << '-';
      } else {
        os << fixing.segments[i][j];
      }
    }
    os << ')';
  }
  os << "] y[";
  for (int b : fixing.binaries) os << b;
  os << ']';
  return os.str();
}

std::size_t canonical_segment(std::span<const double> xi, double threshold) {
  std::size_t first = xi.size(), last = 0;
  for (std::size_t k = 0; k < xi.size(); ++k) {
    if (xi[k] > threshold) {
      first = std::min(first, k);
      last = k;
    }
  }
  if (first == xi.size() || last - first > 1) {
    throw Error(ErrorCode::NoValidSegment, "weights are not supported on one segment");
  }
  if (first == last && first > 0) return first - 1;
  return first;
}

Fixing extract_fixing(const ProblemIR& ir, const MilpModel& milp, std::span<const double> x) {
  // Weights may leak onto a neighbouring breakpoint by as much as the
  // integrality tolerance lets the segment binaries drift.
  constexpr double kLeak = 1e-6;
  Fixing fx;
  for (int b : ir.binary_ids()) fx.binaries.push_back(x[b] > 0.5 ? 1 : 0);
  for (std::size_t i = 0; i < ir.interpolants.size(); ++i) {
    const auto& f = ir.interpolants[i];
    const auto& ic = milp.interp[i];
    std::vector<int> seg(ic.axes.size(), Fixing::kInactive);
    const bool active = !f.activation || x[*f.activation] > 0.5;
    if (active) {
      for (std::size_t j = 0; j < ic.axes.size(); ++j) {
        const auto& ax = ic.axes[j];
        std::size_t best = 0;
        for (std::size_t t = 1; t + 1 < ax.size; ++t) {
          if (x[ax.segment + t] > x[ax.segment + best]) best = t;
        }
        for (std::size_t k = 0; k < ax.size; ++k) {
          if (k == best || k == best + 1) continue;
          if (x[ax.xi + k] > kLeak) {
            throw Error(ErrorCode::NoValidSegment,
                        "interpolant " + f.name + " axis " + std::to_string(j) +
                            " has weight outside segment " + std::to_string(best));
          }
        }
        seg[j] = static_cast<int>(best);
      }
    }
    fx.segments.push_back(std::move(seg));
  }
  return fx;
}

std::size_t fixing_count(const ProblemIR& ir) {
  constexpr std::size_t kMax = std::numeric_limits<std::size_t>::max();
  std::size_t total = 1;
  auto mul = [&](std::size_t f) { total = (f != 0 && total > kMax / f) ? kMax : total * f; };
  for (const auto& f : ir.interpolants) {
    for (std::size_t j = 0; j < f.grid().dims(); ++j) mul(f.grid().segments(j));
  }
  for (std::size_t b = 0; b < ir.num_binaries(); ++b) mul(2);
  return total;
}

BoxNlp build_subproblem(const ProblemIR& ir, const Fixing& fixing) {
  BoxNlp nlp;
  for (const auto& v : ir.variables) {
    nlp.lo.push_back(v.lo);
    nlp.hi.push_back(v.hi);
  }
  const auto bins = ir.binary_ids();
  for (std::size_t b = 0; b < bins.size(); ++b) {
    nlp.lo[bins[b]] = fixing.binaries[b];
    nlp.hi[bins[b]] = fixing.binaries[b];
  }
  auto restrict_to = [&](int var, double lo, double hi) {
    nlp.lo[var] = std::max(nlp.lo[var], lo);
    nlp.hi[var] = std::min(nlp.hi[var], hi);
  };
  for (std::size_t i = 0; i < ir.interpolants.size(); ++i) {
    const auto& f = ir.interpolants[i];
    const Grid& g = f.grid();
    const bool active = fixing.segments[i].empty() || fixing.segments[i][0] != Fixing::kInactive;
    if (!active) {
      for (int v : f.inputs) restrict_to(v, 0.0, 0.0);
      for (const auto& o : f.outputs) restrict_to(o.var, 0.0, 0.0);
      continue;
    }
    CellIndex cell;
    for (std::size_t j = 0; j < g.dims(); ++j) cell.t.push_back(fixing.segments[i][j]);
    std::vector<double> lo, hi;
    for (std::size_t j = 0; j < g.dims(); ++j) {
      lo.push_back(g.axis(j)[cell.t[j]]);
      hi.push_back(g.axis(j)[cell.t[j] + 1]);
      restrict_to(f.inputs[j], lo.back(), hi.back());
    }
    for (const auto& o : f.outputs) {
      auto corners = cell_corner_values(o.table, cell);
      const auto [mn, mx] = std::minmax_element(corners.begin(), corners.end());
      restrict_to(o.var, *mn, *mx);
      nlp.terms.push_back({f.inputs, lo, hi, std::move(corners), o.var});
    }
  }
  for (std::size_t v = 0; v < nlp.lo.size(); ++v) {
    if (nlp.lo[v] > nlp.hi[v]) nlp.empty = true;
  }
  nlp.rows = ir.constraints;
  nlp.objective = ir.objective;
  return nlp;
}

int add_no_good_cut(MilpModel& milp, const ProblemIR& ir, const Fixing& fixing) {
  std::vector<int> idx;
  std::vector<double> val;
  double rhs = 1.0;
  for (std::size_t i = 0; i < fixing.segments.size(); ++i) {
    for (std::size_t j = 0; j < fixing.segments[i].size(); ++j) {
      const int t = fixing.segments[i][j];
      if (t == Fixing::kInactive) continue;
      idx.push_back(milp.interp[i].axes[j].segment + t);
      val.push_back(-1.0);
      rhs -= 1.0;
    }
  }
  const auto bins = ir.binary_ids();
  for (std::size_t b = 0; b < bins.size(); ++b) {
    idx.push_back(bins[b]);
    if (fixing.binaries[b] == 1) {
      val.push_back(-1.0);
      rhs -= 1.0;
    } else {
      val.push_back(1.0);
    }
  }
  const int row = milp.lp.add_row(idx, val, RowSense::Ge, rhs);
  milp.row_names.push_back("nogood_" + std::to_string(milp.num_cuts() - 1));
  return row;
}

}  // namespace mlrfe

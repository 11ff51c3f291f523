#pragma once

// Reference computations kept independent of the library code they check.

#include <cmath>
#include <random>
#include <vector>

#include "mlrfe/model.hpp"
#include "mlrfe/relax.hpp"

namespace oracle {

/// Segment by linear scan: the last breakpoint not above x, capped so the
/// segment stays inside the axis.
inline std::size_t scan_segment(const std::vector<double>& axis, double x) {
  std::size_t t = 0;
  while (t + 2 < axis.size() && axis[t + 1] <= x) ++t;
  return t;
}

inline std::vector<double> hat_weights(const std::vector<double>& axis, double x) {
  std::vector<double> w(axis.size(), 0.0);
  const std::size_t t = scan_segment(axis, x);
  const double s = (x - axis[t]) / (axis[t + 1] - axis[t]);
  w[t] = 1.0 - s;
  w[t + 1] = s;
  return w;
}

/// Completes a point of the original problem with the weight, corner and
/// segment columns of the relaxation.
inline std::vector<double> lift_point(const mlrfe::ProblemIR& ir, const mlrfe::MilpModel& milp,
                                      const std::vector<double>& x) {
  std::vector<double> v(milp.lp.num_cols(), 0.0);
  for (std::size_t j = 0; j < x.size(); ++j) v[j] = x[j];
  for (std::size_t i = 0; i < ir.interpolants.size(); ++i) {
    const auto& f = ir.interpolants[i];
    if (f.activation && x[*f.activation] < 0.5) continue;
    const auto& g = f.grid();
    const auto& ic = milp.interp[i];
    std::vector<std::vector<double>> xi;
    for (std::size_t j = 0; j < g.dims(); ++j) {
      const auto& axis = g.axis(j);
      xi.push_back(hat_weights(axis, x[f.inputs[j]]));
      for (std::size_t k = 0; k < axis.size(); ++k) v[ic.axes[j].xi + k] = xi[j][k];
      v[ic.axes[j].segment + scan_segment(axis, x[f.inputs[j]])] = 1.0;
    }
    for (std::size_t flat = 0; flat < g.num_points(); ++flat) {
      double lam = 1.0;
      std::size_t rest = flat;
      for (std::size_t j = g.dims(); j-- > 0;) {
        lam *= xi[j][rest % g.axis_size(j)];
        rest /= g.axis_size(j);
      }
      v[ic.lambda + flat] = lam;
    }
  }
  return v;
}

/// Largest absolute violation of bounds and rows.
inline double lp_violation(const mlrfe::LpProblem& lp, const std::vector<double>& v) {
  double worst = 0.0;
  for (std::size_t j = 0; j < lp.num_cols(); ++j)
    worst = std::max({worst, lp.lo[j] - v[j], v[j] - lp.hi[j]});
  for (const auto& row : lp.rows) {
    double act = 0.0;
    for (std::size_t k = 0; k < row.idx.size(); ++k) act += row.val[k] * v[row.idx[k]];
    const double d = act - row.rhs;
    if (row.sense == mlrfe::RowSense::Le) worst = std::max(worst, d);
    if (row.sense == mlrfe::RowSense::Ge) worst = std::max(worst, -d);
    if (row.sense == mlrfe::RowSense::Eq) worst = std::max(worst, std::abs(d));
  }
  return worst;
}

/// Product-sum interpolation written out directly.
inline double eval_table(const mlrfe::LookupTable& t, const std::vector<double>& p) {
  const auto& g = t.grid;
  std::vector<std::vector<double>> xi;
  for (std::size_t j = 0; j < g.dims(); ++j) xi.push_back(hat_weights(g.axis(j), p[j]));
  double s = 0.0;
  for (std::size_t flat = 0; flat < g.num_points(); ++flat) {
    double lam = 1.0;
    std::size_t rest = flat;
    for (std::size_t j = g.dims(); j-- > 0;) {
      lam *= xi[j][rest % g.axis_size(j)];
      rest /= g.axis_size(j);
    }
    s += lam * t.values[flat];
  }
  return s;
}

/// Random point of the problem that satisfies all its constraints, found by
/// rejection. Returns false after `tries` failures.
inline bool sample_feasible(const mlrfe::ProblemIR& ir, std::mt19937_64& rng, std::vector<double>& x,
                            int tries = 2000) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int attempt = 0; attempt < tries; ++attempt) {
    x.assign(ir.variables.size(), 0.0);
    for (std::size_t j = 0; j < x.size(); ++j) {
      const auto& v = ir.variables[j];
      if (v.kind == mlrfe::VarKind::Binary) {
        x[j] = u(rng) < 0.5 ? 0.0 : 1.0;
      } else {
        x[j] = v.lo + u(rng) * (v.hi - v.lo);
      }
    }
    for (const auto& f : ir.interpolants) {
      const bool on = !f.activation || x[*f.activation] > 0.5;
      std::vector<double> p;
      for (std::size_t j = 0; j < f.inputs.size(); ++j) {
        const auto& axis = f.grid().axis(j);
        double& xj = x[f.inputs[j]];
        if (!on) {
          xj = 0.0;
        } else {
          xj = axis.front() + u(rng) * (axis.back() - axis.front());
          if (u(rng) < 0.1) xj = axis[static_cast<std::size_t>(u(rng) * axis.size()) % axis.size()];
        }
        p.push_back(xj);
      }
      for (const auto& o : f.outputs) x[o.var] = on ? eval_table(o.table, p) : 0.0;
    }
    if (mlrfe::linear_violation(ir, x) <= 1e-12) return true;
  }
  return false;
}

}  // namespace oracle

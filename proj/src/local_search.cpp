#include "mlrfe/local_search.hpp"

#include <algorithm>
#include <cmath>

namespace mlrfe {

namespace {

std::vector<double> unit_coords(const CellTerm& term, std::span<const double> x) {
  std::vector<double> theta(term.inputs.size());
  for (std::size_t j = 0; j < theta.size(); ++j) {
    const double w = term.hi[j] - term.lo[j];
    theta[j] = w > 0 ? (x[term.inputs[j]] - term.lo[j]) / w : 0.0;
  }
  return theta;
}

double row_activity(const LinConstraint& row, std::span<const double> x, double* scale) {
  double act = 0.0;
  double s = std::max(1.0, std::abs(row.rhs));
  for (const auto& t : row.terms) {
    act += t.coef * x[t.var];
    s = std::max(s, std::abs(t.coef * x[t.var]));
  }
  if (scale) *scale = s;
  return act;
}

double row_excess(const LinConstraint& row, double act) {
  switch (row.sense) {
    case RowSense::Le: return std::max(0.0, act - row.rhs);
    case RowSense::Ge: return std::max(0.0, row.rhs - act);
    case RowSense::Eq: return std::abs(act - row.rhs);
  }
  return 0.0;
}

// Unscaled l1 infeasibility of rows and terms; matches the elastic LP model.
double l1_infeasibility(const BoxNlp& nlp, std::span<const double> x) {
  double v = 0.0;
  for (const auto& row : nlp.rows) v += row_excess(row, row_activity(row, x, nullptr));
  for (const auto& t : nlp.terms) v += std::abs(x[t.output] - term_value(t, x));
  return v;
}

}  // namespace

double term_value(const CellTerm& term, std::span<const double> x) {
  return multilinear_eval(term.corners, unit_coords(term, x));
}

std::vector<double> term_gradient(const CellTerm& term, std::span<const double> x) {
  auto g = multilinear_gradient(term.corners, unit_coords(term, x));
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double w = term.hi[j] - term.lo[j];
    g[j] = w > 0 ? g[j] / w : 0.0;
  }
  return g;
}

double nlp_objective(const BoxNlp& nlp, std::span<const double> x) {
  double v = nlp.objective.constant;
  for (const auto& t : nlp.objective.terms) v += t.coef * x[t.var];
  return v;
}

double nlp_violation(const BoxNlp& nlp, std::span<const double> x) {
  double worst = 0.0;
  for (std::size_t j = 0; j < nlp.lo.size(); ++j) {
    worst = std::max(worst, (nlp.lo[j] - x[j]) / std::max(1.0, std::abs(nlp.lo[j])));
    worst = std::max(worst, (x[j] - nlp.hi[j]) / std::max(1.0, std::abs(nlp.hi[j])));
  }
  for (const auto& row : nlp.rows) {
    double scale = 1.0;
    const double act = row_activity(row, x, &scale);
    worst = std::max(worst, row_excess(row, act) / scale);
  }
  for (const auto& t : nlp.terms) {
    const double f = term_value(t, x);
    worst = std::max(worst, std::abs(x[t.output] - f) / std::max(1.0, std::abs(f)));
  }
  return worst;
}

LocalResult local_solve(const BoxNlp& nlp, std::vector<double> x, const LocalOptions& options) {
  const std::size_t n = nlp.lo.size();
  LocalResult res;
  if (nlp.empty) return res;
  for (std::size_t j = 0; j < n; ++j) x[j] = std::clamp(x[j], nlp.lo[j], nlp.hi[j]);
  for (const auto& t : nlp.terms) {
    x[t.output] = std::clamp(term_value(t, x), nlp.lo[t.output], nlp.hi[t.output]);
  }

  std::vector<double> cost(n, 0.0);
  double cmax = 0.0;
  for (const auto& t : nlp.objective.terms) {
    cost[t.var] += t.coef;
    cmax = std::max(cmax, std::abs(t.coef));
  }
  std::vector<double> width(n);
  for (std::size_t j = 0; j < n; ++j) {
    const bool finite = std::isfinite(nlp.lo[j]) && std::isfinite(nlp.hi[j]);
    width[j] = finite ? nlp.hi[j] - nlp.lo[j] : 10.0 * std::max(1.0, std::abs(x[j]));
  }

  double mu = 10.0 * (1.0 + cmax);
  double radius = options.initial_radius;
  auto merit = [&](std::span<const double> p) {
    double v = 0.0;
    for (std::size_t j = 0; j < n; ++j) v += cost[j] * p[j];
    return v + mu * l1_infeasibility(nlp, p);
  };

  for (int it = 0; it < options.max_iterations; ++it) {
    LpProblem lp;
    for (std::size_t j = 0; j < n; ++j) {
      const double lo = std::max(nlp.lo[j], x[j] - radius * width[j]);
      const double hi = std::min(nlp.hi[j], x[j] + radius * width[j]);
      lp.add_column(std::min(lo, x[j]), std::max(hi, x[j]), cost[j]);
    }
    for (const auto& row : nlp.rows) {
      std::vector<int> idx;
      std::vector<double> val;
      for (const auto& t : row.terms) {
        idx.push_back(t.var);
        val.push_back(t.coef);
      }
      if (row.sense != RowSense::Ge) {
        idx.push_back(lp.add_column(0, kInf, mu));
        val.push_back(-1.0);
      }
      if (row.sense != RowSense::Le) {
        idx.push_back(lp.add_column(0, kInf, mu));
        val.push_back(1.0);
      }
      lp.add_row(idx, val, row.sense, row.rhs);
    }
    for (const auto& t : nlp.terms) {
      const auto g = term_gradient(t, x);
      double rhs = term_value(t, x);
      std::vector<int> idx{t.output};
      std::vector<double> val{1.0};
      for (std::size_t j = 0; j < g.size(); ++j) {
        idx.push_back(t.inputs[j]);
        val.push_back(-g[j]);
        rhs -= g[j] * x[t.inputs[j]];
      }
      idx.push_back(lp.add_column(0, kInf, mu));
      val.push_back(1.0);
      idx.push_back(lp.add_column(0, kInf, mu));
      val.push_back(-1.0);
      lp.add_row(idx, val, RowSense::Eq, rhs);
    }
    LpResult r;
    try {
      r = solve_lp(lp);
    } catch (const Error&) {
      break;
    }
    if (r.status != LpStatus::Optimal) break;

    const double m0 = merit(x);
    const double predicted = m0 - r.objective;
    if (predicted <= 1e-12 * (1.0 + std::abs(m0))) {
      if (l1_infeasibility(nlp, x) <= 1e-12 || mu > 1e10) break;
      mu *= 10.0;
      continue;
    }
    std::vector<double> cand(r.x.begin(), r.x.begin() + static_cast<long>(n));
    const double actual = m0 - merit(cand);
    const double rho = actual / predicted;
    if (rho >= 0.1) {
      x = std::move(cand);
      if (rho > 0.75) radius = std::min(1.0, 2.0 * radius);
    } else {
      radius *= 0.25;
      if (radius < 1e-12) break;
    }
  }

  res.x = x;
  res.objective = nlp_objective(nlp, x);
  res.violation = nlp_violation(nlp, x);
  res.feasible = res.violation <= options.feas_tol;
  return res;
}

}  // namespace mlrfe

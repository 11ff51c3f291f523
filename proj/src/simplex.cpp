#include "mlrfe/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "mlrfe/error.hpp"

namespace mlrfe {

const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::Optimal: return "Optimal";
    case LpStatus::Infeasible: return "Infeasible";
    case LpStatus::Unbounded: return "Unbounded";
  }
  return "?";
}

std::size_t LpProblem::nonzeros() const {
  std::size_t nz = 0;
  for (const auto& r : rows) nz += r.idx.size();
  return nz;
}

int LpProblem::add_column(double l, double h, double c) {
  lo.push_back(l);
  hi.push_back(h);
  cost.push_back(c);
  return static_cast<int>(cost.size() - 1);
}

int LpProblem::add_row(std::vector<int> idx, std::vector<double> val, RowSense sense, double rhs) {
  std::map<int, double> merged;
  for (std::size_t k = 0; k < idx.size(); ++k) merged[idx[k]] += val[k];
  LpRow row;
  row.sense = sense;
  row.rhs = rhs;
  for (const auto& [j, v] : merged) {
    if (v == 0.0) continue;
    row.idx.push_back(j);
    row.val.push_back(v);
  }
  rows.push_back(std::move(row));
  return static_cast<int>(rows.size() - 1);
}

namespace {

bool finite(double v) { return std::isfinite(v); }

}  // namespace

DenseSimplex::DenseSimplex(const LpProblem& lp, LpOptions options) : lp_(lp), opt_(options) {
  if (lp.nonzeros() > opt_.max_nonzeros) {
    throw Error(ErrorCode::ProblemTooLarge,
                "LP has " + std::to_string(lp.nonzeros()) +
                    " nonzeros, dense simplex limit is " + std::to_string(opt_.max_nonzeros));
  }
  m_ = lp.num_rows();
  n_ = lp.num_cols();
  ncols_ = n_ + 2 * m_;
  compute_scaling();
  const std::size_t w = n_ + m_;
  dense_a_.assign(m_ * w, 0.0);
  rhs_.assign(m_, 0.0);
  for (std::size_t r = 0; r < m_; ++r) {
    const auto& row = lp.rows[r];
    for (std::size_t k = 0; k < row.idx.size(); ++k) {
      dense_a_[r * w + row.idx[k]] += row_scale_[r] * row.val[k] * col_scale_[row.idx[k]];
    }
    dense_a_[r * w + n_ + r] = 1.0;
    rhs_[r] = row_scale_[r] * row.rhs;
  }
  sparse_rows_.resize(m_);
  for (std::size_t r = 0; r < m_; ++r) {
    for (std::size_t j = 0; j < w; ++j) {
      const double a = dense_a_[r * w + j];
      if (a != 0.0) sparse_rows_[r].push_back({j, a});
    }
  }
  lo_.assign(ncols_, 0.0);
  hi_.assign(ncols_, 0.0);
  cost2_.assign(ncols_, 0.0);
  for (std::size_t j = 0; j < n_; ++j) {
    lo_[j] = lp.lo[j] / col_scale_[j];
    hi_[j] = lp.hi[j] / col_scale_[j];
    cost2_[j] = lp.cost[j] * col_scale_[j];
  }
  for (std::size_t r = 0; r < m_; ++r) {
    switch (lp.rows[r].sense) {
      case RowSense::Le: lo_[n_ + r] = 0.0; hi_[n_ + r] = kInf; break;
      case RowSense::Ge: lo_[n_ + r] = -kInf; hi_[n_ + r] = 0.0; break;
      case RowSense::Eq: lo_[n_ + r] = 0.0; hi_[n_ + r] = 0.0; break;
    }
  }
  art_sign_.assign(m_, 1.0);
  beta_.assign(m_, 0.0);
  value_.assign(ncols_, 0.0);
  d_.assign(ncols_, 0.0);
  basis_.assign(m_, 0);
  where_.assign(ncols_, Where::AtLower);
}

void DenseSimplex::compute_scaling() {
  row_scale_.assign(m_, 1.0);
  col_scale_.assign(n_, 1.0);
  if (!opt_.scale) return;
  // Geometric-mean equilibration, a few alternating passes, rounded to powers
  // of two so scaling itself is exact.
  auto pow2 = [](double v) { return std::exp2(std::round(std::log2(v))); };
  for (int pass = 0; pass < 4; ++pass) {
    for (std::size_t r = 0; r < m_; ++r) {
      const auto& row = lp_.rows[r];
      double lo = kInf, hi = 0.0;
      for (std::size_t k = 0; k < row.idx.size(); ++k) {
        const double a = std::abs(row.val[k] * col_scale_[row.idx[k]]);
        if (a == 0.0) continue;
        lo = std::min(lo, a);
        hi = std::max(hi, a);
      }
      if (hi > 0.0) row_scale_[r] = pow2(1.0 / std::sqrt(lo * hi));
    }
    std::vector<double> lo(n_, kInf), hi(n_, 0.0);
    for (std::size_t r = 0; r < m_; ++r) {
      const auto& row = lp_.rows[r];
      for (std::size_t k = 0; k < row.idx.size(); ++k) {
        const double a = std::abs(row.val[k] * row_scale_[r]);
        if (a == 0.0) continue;
        lo[row.idx[k]] = std::min(lo[row.idx[k]], a);
        hi[row.idx[k]] = std::max(hi[row.idx[k]], a);
      }
    }
    for (std::size_t j = 0; j < n_; ++j)
      if (hi[j] > 0.0) col_scale_[j] = pow2(1.0 / std::sqrt(lo[j] * hi[j]));
  }
}

double DenseSimplex::original(std::size_t r, std::size_t j) const {
  if (j < n_ + m_) return dense_a_[r * (n_ + m_) + j];
  return (j - n_ - m_ == r) ? art_sign_[r] : 0.0;
}

void DenseSimplex::set_bounds(int col, double lo, double hi) {
  lo /= col_scale_[col];
  hi /= col_scale_[col];
  lo_[col] = lo;
  hi_[col] = hi;
  if (has_basis_ && where_[col] != Where::Basic) {
    if (where_[col] == Where::AtLower && finite(lo)) {
      value_[col] = lo;
    } else if (where_[col] == Where::AtUpper && finite(hi)) {
      value_[col] = hi;
    } else {
      place_nonbasic(col);
    }
  }
}

void DenseSimplex::place_nonbasic(std::size_t j) {
  if (finite(lo_[j])) {
    where_[j] = Where::AtLower;
    value_[j] = lo_[j];
  } else if (finite(hi_[j])) {
    where_[j] = Where::AtUpper;
    value_[j] = hi_[j];
  } else {
    where_[j] = Where::AtZero;
    value_[j] = 0.0;
  }
}

void DenseSimplex::cold_start() {
  // Slack basis where the slack can take up the row residual, artificials
  // elsewhere.
  for (std::size_t j = 0; j < n_; ++j) place_nonbasic(j);
  width_ = ncols_;
  tableau_.assign(m_ * ncols_, 0.0);
  for (std::size_t r = 0; r < m_; ++r) {
    double resid = rhs_[r];
    for (const auto& [j, a] : sparse_rows_[r]) {
      if (j < n_ && value_[j] != 0.0) resid -= a * value_[j];
    }
    const std::size_t slack = n_ + r;
    const std::size_t art = n_ + m_ + r;
    art_sign_[r] = resid >= 0.0 ? 1.0 : -1.0;
    lo_[art] = 0.0;
    if (resid >= lo_[slack] && resid <= hi_[slack] && lo_[slack] < hi_[slack]) {
      basis_[r] = slack;
      where_[slack] = Where::Basic;
      value_[slack] = 0.0;
      beta_[r] = resid;
      for (const auto& [j, a] : sparse_rows_[r]) tab(r, j) = a;
      tab(r, art) = art_sign_[r];
      hi_[art] = 0.0;
      where_[art] = Where::AtLower;
      value_[art] = 0.0;
      continue;
    }
    place_nonbasic(slack);
    resid -= value_[slack];
    art_sign_[r] = resid >= 0.0 ? 1.0 : -1.0;
    hi_[art] = kInf;
    basis_[r] = art;
    where_[art] = Where::Basic;
    value_[art] = 0.0;
    beta_[r] = std::abs(resid);
    // B = diag(sign) so B^-1 A scales row r by its sign.
    for (const auto& [j, a] : sparse_rows_[r]) tab(r, j) = art_sign_[r] * a;
    tab(r, art) = 1.0;
  }
  has_basis_ = true;
  since_refactor_ = 0;
}

bool DenseSimplex::refactor() {
  // Basic slack and artificial columns are signed unit vectors, so B only
  // needs the k x k block of structural basics on the rows no unit column
  // covers:  B = [A11 0; A21 D]  with D = diag(+-1).
  const std::size_t w = n_ + m_;
  std::vector<std::ptrdiff_t> unit_pos(m_, -1);
  std::vector<double> unit_sign(m_, 1.0);
  std::vector<std::ptrdiff_t> spos(n_, -1);
  std::vector<std::size_t> sbasic;  // basis positions of structural columns
  for (std::size_t c = 0; c < m_; ++c) {
    const std::size_t j = basis_[c];
    if (j < n_) {
      spos[j] = static_cast<std::ptrdiff_t>(sbasic.size());
      sbasic.push_back(c);
      continue;
    }
    const std::size_t r = j < w ? j - n_ : j - w;
    if (unit_pos[r] >= 0) return false;
    unit_pos[r] = static_cast<std::ptrdiff_t>(c);
    unit_sign[r] = j < w ? 1.0 : art_sign_[r];
  }
  const std::size_t k = sbasic.size();
  std::vector<std::size_t> free_rows;
  for (std::size_t r = 0; r < m_; ++r)
    if (unit_pos[r] < 0) free_rows.push_back(r);
  if (free_rows.size() != k) return false;

  // [A11 | I] -> [I | A11^-1]
  const std::size_t k2 = 2 * k;
  std::vector<double> aug(k * k2, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    for (const auto& [j, a] : sparse_rows_[free_rows[i]])
      if (j < n_ && spos[j] >= 0) aug[i * k2 + spos[j]] = a;
    aug[i * k2 + k + i] = 1.0;
  }
  std::vector<std::size_t> nz;
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t p = c;
    double best = std::abs(aug[c * k2 + c]);
    for (std::size_t r = c + 1; r < k; ++r) {
      if (std::abs(aug[r * k2 + c]) > best) {
        best = std::abs(aug[r * k2 + c]);
        p = r;
      }
    }
    if (best < 1e-12) return false;
    if (p != c) std::swap_ranges(&aug[p * k2], &aug[p * k2] + k2, &aug[c * k2]);
    double* prow = &aug[c * k2];
    const double piv = prow[c];
    nz.clear();
    for (std::size_t q = 0; q < k2; ++q) {
      if (prow[q] == 0.0) continue;
      prow[q] /= piv;
      nz.push_back(q);
    }
    for (std::size_t r = 0; r < k; ++r) {
      if (r == c) continue;
      double* row = &aug[r * k2];
      const double f = row[c];
      if (f == 0.0) continue;
      for (std::size_t q : nz) row[q] -= f * prow[q];
    }
  }

  // Effective right-hand side with nonbasic columns moved over.
  std::vector<double> rhs(m_);
  for (std::size_t r = 0; r < m_; ++r) {
    double v = rhs_[r];
    for (const auto& [j, a] : sparse_rows_[r]) {
      if (where_[j] != Where::Basic && value_[j] != 0.0) v -= a * value_[j];
    }
    const std::size_t art = w + r;
    if (where_[art] != Where::Basic && value_[art] != 0.0) v -= art_sign_[r] * value_[art];
    rhs[r] = v;
  }

  tableau_.assign(m_ * ncols_, 0.0);
  const bool with_art = width_ > w;
  auto add_row = [&](double* trow, std::size_t r, double f) {
    for (const auto& [j, a] : sparse_rows_[r]) trow[j] += f * a;
    if (with_art) trow[w + r] += f * art_sign_[r];
  };
  // Structural rows: A11^-1 applied to the free rows.
  for (std::size_t l = 0; l < k; ++l) {
    const std::size_t c = sbasic[l];
    double* trow = &tableau_[c * ncols_];
    const double* inv = &aug[l * k2 + k];
    double b = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      const double f = inv[i];
      if (f == 0.0) continue;
      add_row(trow, free_rows[i], f);
      b += f * rhs[free_rows[i]];
    }
    beta_[c] = b;
  }
  // Unit rows: sign * (row - A21 * structural rows).
  for (std::size_t r = 0; r < m_; ++r) {
    if (unit_pos[r] < 0) continue;
    const std::size_t c = static_cast<std::size_t>(unit_pos[r]);
    const double sg = unit_sign[r];
    double* trow = &tableau_[c * ncols_];
    add_row(trow, r, sg);
    double b = sg * rhs[r];
    for (const auto& [j, a] : sparse_rows_[r]) {
      if (j >= n_ || spos[j] < 0) continue;
      const std::size_t src = sbasic[static_cast<std::size_t>(spos[j])];
      const double f = sg * a;
      const double* srow = &tableau_[src * ncols_];
      for (std::size_t q = 0; q < width_; ++q) trow[q] -= f * srow[q];
      b -= f * beta_[src];
    }
    beta_[c] = b;
  }
  since_refactor_ = 0;
  return true;
}

void DenseSimplex::compute_reduced_costs(const std::vector<double>& cost) {
  d_ = cost;
  for (std::size_t r = 0; r < m_; ++r) {
    const double cb = cost[basis_[r]];
    if (cb == 0.0) continue;
    const double* trow = &tableau_[r * ncols_];
    for (std::size_t j = 0; j < width_; ++j) d_[j] -= cb * trow[j];
  }
  for (std::size_t r = 0; r < m_; ++r) d_[basis_[r]] = 0.0;
}

void DenseSimplex::pivot(std::size_t row, std::size_t col) {
  double* prow = &tableau_[row * ncols_];
  const double piv = prow[col];
  nz_.clear();
  for (std::size_t j = 0; j < width_; ++j) {
    if (prow[j] == 0.0) continue;
    prow[j] /= piv;
    nz_.push_back(j);
  }
  prow[col] = 1.0;
  for (std::size_t r = 0; r < m_; ++r) {
    if (r == row) continue;
    double* trow = &tableau_[r * ncols_];
    const double f = trow[col];
    if (f == 0.0) continue;
    for (std::size_t j : nz_) trow[j] -= f * prow[j];
    trow[col] = 0.0;
  }
  const double f = d_[col];
  if (f != 0.0) {
    for (std::size_t j : nz_) d_[j] -= f * prow[j];
  }
  d_[col] = 0.0;
  basis_[row] = col;
  where_[col] = Where::Basic;
  ++iterations_;
  ++since_refactor_;
}

bool DenseSimplex::eligible_to_enter(std::size_t j) const {
  return j < width_ && where_[j] != Where::Basic && lo_[j] < hi_[j];
}

DenseSimplex::Outcome DenseSimplex::primal(const std::vector<double>& cost) {
  bland_ = false;
  int degenerate = 0;
  const int degenerate_limit = static_cast<int>(2 * (m_ + n_));
  for (;;) {
    if (iterations_ >= opt_.max_iterations) return Outcome::IterationLimit;
    if (since_refactor_ >= opt_.refactor_interval) {
      if (!refactor()) return Outcome::IterationLimit;
      compute_reduced_costs(cost);
    }

    std::size_t q = ncols_;
    double dir = 0.0;
    double best = 0.0;
    for (std::size_t j = 0; j < ncols_; ++j) {
      if (!eligible_to_enter(j)) continue;
      const double dj = d_[j];
      double score = 0.0;
      double s = 0.0;
      if (where_[j] == Where::AtLower && dj < -opt_.dual_tol) {
        score = -dj;
        s = 1.0;
      } else if (where_[j] == Where::AtUpper && dj > opt_.dual_tol) {
        score = dj;
        s = -1.0;
      } else if (where_[j] == Where::AtZero && std::abs(dj) > opt_.dual_tol) {
        score = std::abs(dj);
        s = dj < 0 ? 1.0 : -1.0;
      } else {
        continue;
      }
      if (bland_) {
        q = j;
        dir = s;
        break;
      }
      if (score > best) {
        best = score;
        q = j;
        dir = s;
      }
    }
    if (q == ncols_) return Outcome::Optimal;

    const double flip = (finite(lo_[q]) && finite(hi_[q])) ? hi_[q] - lo_[q] : kInf;

    // Harris two-pass ratio test; Bland mode takes the exact minimum.
    auto limit = [&](std::size_t r, double slack) -> double {
      const double a = tab(r, q);
      if (std::abs(a) < opt_.pivot_tol) return kInf;
      const double delta = -dir * a;
      const std::size_t b = basis_[r];
      if (delta < 0 && finite(lo_[b])) {
        return (beta_[r] - lo_[b] + slack * (1.0 + std::abs(lo_[b]))) / -delta;
      }
      if (delta > 0 && finite(hi_[b])) {
        return (hi_[b] - beta_[r] + slack * (1.0 + std::abs(hi_[b]))) / delta;
      }
      return kInf;
    };
    std::size_t leave = m_;
    double step = kInf;
    if (bland_) {
      for (std::size_t r = 0; r < m_; ++r) {
        const double l = std::max(0.0, limit(r, 0.0));
        if (l < step || (l == step && leave < m_ && basis_[r] < basis_[leave])) {
          step = l;
          leave = r;
        }
      }
    } else {
      double bound = kInf;
      for (std::size_t r = 0; r < m_; ++r) bound = std::min(bound, limit(r, opt_.primal_tol));
      if (finite(bound)) {
        double pivot_size = 0.0;
        for (std::size_t r = 0; r < m_; ++r) {
          const double l = limit(r, 0.0);
          if (l <= bound && std::abs(tab(r, q)) > pivot_size) {
            pivot_size = std::abs(tab(r, q));
            leave = r;
            step = std::max(0.0, l);
          }
        }
      }
    }

    if (leave == m_ && !finite(flip)) return Outcome::Unbounded;

    if (flip <= step) {
      for (std::size_t r = 0; r < m_; ++r) beta_[r] -= dir * tab(r, q) * flip;
      if (where_[q] == Where::AtLower) {
        where_[q] = Where::AtUpper;
        value_[q] = hi_[q];
      } else {
        where_[q] = Where::AtLower;
        value_[q] = lo_[q];
      }
      ++iterations_;
      degenerate = 0;
      bland_ = false;
      continue;
    }

    const double a = tab(leave, q);
    const double delta = -dir * a;
    for (std::size_t r = 0; r < m_; ++r) beta_[r] -= dir * tab(r, q) * step;
    const std::size_t b = basis_[leave];
    if (delta < 0) {
      where_[b] = Where::AtLower;
      value_[b] = lo_[b];
    } else {
      where_[b] = Where::AtUpper;
      value_[b] = hi_[b];
    }
    const double entering = value_[q] + dir * step;
    pivot(leave, q);
    beta_[leave] = entering;

    if (step <= 1e-12) {
      if (++degenerate > degenerate_limit) bland_ = true;
    } else {
      degenerate = 0;
      bland_ = false;
    }
  }
}

bool DenseSimplex::primal_feasible() const {
  for (std::size_t r = 0; r < m_; ++r) {
    const std::size_t b = basis_[r];
    if (beta_[r] < lo_[b] - opt_.primal_tol * (1.0 + std::abs(lo_[b]))) return false;
    if (beta_[r] > hi_[b] + opt_.primal_tol * (1.0 + std::abs(hi_[b]))) return false;
  }
  return true;
}

bool DenseSimplex::dual_feasible() const {
  for (std::size_t j = 0; j < ncols_; ++j) {
    if (!eligible_to_enter(j)) continue;
    if (where_[j] == Where::AtLower && d_[j] < -opt_.dual_tol) return false;
    if (where_[j] == Where::AtUpper && d_[j] > opt_.dual_tol) return false;
    if (where_[j] == Where::AtZero && std::abs(d_[j]) > opt_.dual_tol) return false;
  }
  return true;
}

DenseSimplex::Outcome DenseSimplex::dual(const std::vector<double>& cost) {
  for (;;) {
    if (iterations_ >= opt_.max_iterations) return Outcome::IterationLimit;
    if (since_refactor_ >= opt_.refactor_interval) {
      if (!refactor()) return Outcome::IterationLimit;
      compute_reduced_costs(cost);
    }
    std::size_t leave = m_;
    double worst = 0.0;
    bool below = false;
    for (std::size_t r = 0; r < m_; ++r) {
      const std::size_t b = basis_[r];
      const double lo_gap = lo_[b] - beta_[r];
      const double hi_gap = beta_[r] - hi_[b];
      if (lo_gap > opt_.primal_tol * (1.0 + std::abs(lo_[b])) && lo_gap > worst) {
        worst = lo_gap;
        leave = r;
        below = true;
      } else if (hi_gap > opt_.primal_tol * (1.0 + std::abs(hi_[b])) && hi_gap > worst) {
        worst = hi_gap;
        leave = r;
        below = false;
      }
    }
    if (leave == m_) return Outcome::Optimal;

    const double sgn = below ? 1.0 : -1.0;
    std::size_t q = ncols_;
    double best_ratio = kInf;
    double best_piv = 0.0;
    for (std::size_t j = 0; j < ncols_; ++j) {
      if (!eligible_to_enter(j)) continue;
      const double a = tab(leave, j);
      if (std::abs(a) < opt_.pivot_tol) continue;
      const bool ok = (where_[j] == Where::AtLower && a * sgn < 0) ||
                      (where_[j] == Where::AtUpper && a * sgn > 0) || where_[j] == Where::AtZero;
      if (!ok) continue;
      const double ratio = std::abs(d_[j]) / std::abs(a);
      if (ratio < best_ratio - 1e-12 ||
          (ratio <= best_ratio + 1e-12 && std::abs(a) > best_piv)) {
        best_ratio = std::min(ratio, best_ratio);
        best_piv = std::abs(a);
        q = j;
      }
    }
    if (q == ncols_) return Outcome::Infeasible;

    const std::size_t b = basis_[leave];
    const double target = below ? lo_[b] : hi_[b];
    const double a = tab(leave, q);
    const double dx = (beta_[leave] - target) / a;
    for (std::size_t r = 0; r < m_; ++r) beta_[r] -= tab(r, q) * dx;
    where_[b] = below ? Where::AtLower : Where::AtUpper;
    value_[b] = target;
    const double entering = value_[q] + dx;
    pivot(leave, q);
    beta_[leave] = entering;
  }
}

bool DenseSimplex::verify(double* primal_residual) const {
  std::vector<double> x(ncols_);
  for (std::size_t j = 0; j < ncols_; ++j) x[j] = value_[j];
  for (std::size_t r = 0; r < m_; ++r) x[basis_[r]] = beta_[r];
  double worst = 0.0;
  for (std::size_t j = 0; j < ncols_; ++j) {
    worst = std::max(worst, (lo_[j] - x[j]) / (1.0 + std::abs(lo_[j])));
    worst = std::max(worst, (x[j] - hi_[j]) / (1.0 + std::abs(hi_[j])));
  }
  for (std::size_t r = 0; r < m_; ++r) {
    double act = 0.0;
    for (std::size_t j = 0; j < ncols_; ++j) {
      const double a = original(r, j);
      if (a != 0.0) act += a * x[j];
    }
    worst = std::max(worst, std::abs(act - rhs_[r]) / (1.0 + std::abs(rhs_[r])));
  }
  if (primal_residual) *primal_residual = worst;
  return worst <= 1e-7;
}

LpResult DenseSimplex::finish(LpStatus status) {
  LpResult res;
  res.status = status;
  res.iterations = iterations_;
  if (status != LpStatus::Optimal) return res;
  res.x.assign(n_, 0.0);
  for (std::size_t j = 0; j < n_; ++j) res.x[j] = value_[j];
  for (std::size_t r = 0; r < m_; ++r) {
    if (basis_[r] < n_) res.x[basis_[r]] = beta_[r];
  }
  for (std::size_t j = 0; j < n_; ++j) {
    res.x[j] = std::clamp(res.x[j] * col_scale_[j], lower(static_cast<int>(j)),
                          upper(static_cast<int>(j)));
  }
  res.objective = lp_.cost_offset;
  for (std::size_t j = 0; j < n_; ++j) res.objective += lp_.cost[j] * res.x[j];
  res.duals.assign(m_, 0.0);
  for (std::size_t i = 0; i < m_; ++i) {
    double y = 0.0;
    for (std::size_t r = 0; r < m_; ++r) y += cost2_[basis_[r]] * tab(r, n_ + i);
    res.duals[i] = y * row_scale_[i];
  }
  res.basis.assign(where_.begin(), where_.begin() + static_cast<long>(n_ + m_));
  return res;
}

LpResult DenseSimplex::solve_from_scratch() {
  std::vector<double> phase1(ncols_, 0.0);
  for (std::size_t r = 0; r < m_; ++r) phase1[n_ + m_ + r] = 1.0;

  for (int attempt = 0; attempt <= opt_.max_refactor_retries; ++attempt) {
    cold_start();
    compute_reduced_costs(phase1);
    Outcome out = primal(phase1);
    if (out == Outcome::IterationLimit) break;
    if (!refactor()) continue;
    // Phase-1 residue is the row residual; judge it the way verify() does.
    double infeas = 0.0;
    for (std::size_t r = 0; r < m_; ++r) {
      if (basis_[r] < n_ + m_) continue;
      const std::size_t row = basis_[r] - n_ - m_;
      infeas = std::max(infeas, std::max(0.0, beta_[r]) / (1.0 + std::abs(rhs_[row])));
    }
    if (infeas > opt_.infeasible_tol) return finish(LpStatus::Infeasible);

    // Accepted residue stays capped where it is so phase 2 starts feasible.
    for (std::size_t r = 0; r < m_; ++r) {
      const std::size_t art = n_ + m_ + r;
      hi_[art] = 0.0;
      if (where_[art] != Where::Basic) {
        where_[art] = Where::AtLower;
        value_[art] = 0.0;
      }
    }
    for (std::size_t r = 0; r < m_; ++r) {
      if (basis_[r] >= n_ + m_) hi_[basis_[r]] = std::max(0.0, beta_[r]);
    }
    // Drive remaining artificials out of the basis where a pivot exists.
    for (std::size_t r = 0; r < m_; ++r) {
      if (basis_[r] < n_ + m_) continue;
      std::size_t q = ncols_;
      double big = 1e-7;
      for (std::size_t j = 0; j < n_ + m_; ++j) {
        if (where_[j] == Where::Basic) continue;
        if (std::abs(tab(r, j)) > big) {
          big = std::abs(tab(r, j));
          q = j;
        }
      }
      if (q == ncols_) continue;
      const std::size_t art = basis_[r];
      where_[art] = Where::AtLower;
      value_[art] = 0.0;
      pivot(r, q);
    }
    width_ = n_ + m_;  // artificial columns are dead from here on
    if (!refactor()) continue;
    compute_reduced_costs(cost2_);
    out = primal(cost2_);
    if (out == Outcome::Unbounded) return finish(LpStatus::Unbounded);
    if (out != Outcome::Optimal) break;
    for (int retry = 0; retry < 2; ++retry) {
      if (!refactor()) break;
      compute_reduced_costs(cost2_);
      if (verify(nullptr) && dual_feasible()) return finish(LpStatus::Optimal);
      // Drift after a long run leaves basics slightly out of bounds while the
      // basis is still dual feasible.
      if (!primal_feasible() && dual_feasible()) {
        out = dual(cost2_);
        if (out != Outcome::Optimal) break;
      }
      out = primal(cost2_);
      if (out == Outcome::Unbounded) return finish(LpStatus::Unbounded);
      if (out != Outcome::Optimal) break;
    }
  }
  has_basis_ = false;
  throw Error(ErrorCode::NumericalFailure, "simplex failed to reach a verified optimum");
}

bool DenseSimplex::set_basis(const LpBasis& basis) {
  const std::size_t w = n_ + m_;
  if (basis.size() != w) return false;
  if (static_cast<std::size_t>(std::count(basis.begin(), basis.end(), Where::Basic)) != m_) return false;
  std::size_t r = 0;
  for (std::size_t j = 0; j < w; ++j) {
    where_[j] = basis[j];
    if (basis[j] == Where::Basic) {
      basis_[r++] = j;
      value_[j] = 0.0;
    } else if (basis[j] == Where::AtLower && finite(lo_[j])) {
      value_[j] = lo_[j];
    } else if (basis[j] == Where::AtUpper && finite(hi_[j])) {
      value_[j] = hi_[j];
    } else {
      place_nonbasic(j);
    }
  }
  for (std::size_t k = 0; k < m_; ++k) {
    const std::size_t art = w + k;
    art_sign_[k] = 1.0;
    lo_[art] = hi_[art] = 0.0;
    where_[art] = Where::AtLower;
    value_[art] = 0.0;
  }
  width_ = w;
  has_basis_ = true;
  since_refactor_ = 0;
  return true;
}

LpResult DenseSimplex::solve_cold() {
  has_basis_ = false;
  return solve_from_scratch();
}

LpResult DenseSimplex::solve() {
  if (!has_basis_) return solve_from_scratch();
  if (!refactor()) return solve_cold();
  compute_reduced_costs(cost2_);
  Outcome out;
  if (primal_feasible()) {
    out = primal(cost2_);
  } else if (dual_feasible()) {
    out = dual(cost2_);
    if (out == Outcome::Infeasible) return finish(LpStatus::Infeasible);
    if (out == Outcome::Optimal) out = primal(cost2_);
  } else {
    return solve_cold();
  }
  if (out == Outcome::Unbounded) return finish(LpStatus::Unbounded);
  if (out != Outcome::Optimal) return solve_cold();
  if (!refactor()) return solve_cold();
  compute_reduced_costs(cost2_);
  if (verify(nullptr) && dual_feasible()) return finish(LpStatus::Optimal);
  return solve_cold();
}

LpResult solve_lp(const LpProblem& lp, const LpOptions& options, const LpBasis* start) {
  DenseSimplex s(lp, options);
  if (start) s.set_basis(*start);
  try {
    return s.solve();
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NumericalFailure || !options.scale) throw;
  }
  LpOptions plain = options;
  plain.scale = false;
  DenseSimplex u(lp, plain);
  return u.solve();
}

double lp_dual_bound(const LpProblem& lp, const std::vector<double>& duals) {
  const double tol = 1e-9;
  double bound = lp.cost_offset;
  std::vector<double> d = lp.cost;
  for (std::size_t r = 0; r < lp.rows.size(); ++r) {
    const auto& row = lp.rows[r];
    const double y = duals[r];
    bound += y * row.rhs;
    for (std::size_t k = 0; k < row.idx.size(); ++k) d[row.idx[k]] -= y * row.val[k];
    // slack s_r with cost 0 and reduced cost -y
    const double ds = -y;
    if (row.sense == RowSense::Le && ds < -tol) return -kInf;
    if (row.sense == RowSense::Ge && ds > tol) return -kInf;
  }
  for (std::size_t j = 0; j < d.size(); ++j) {
    if (d[j] > 0) {
      if (!finite(lp.lo[j])) {
        if (d[j] > tol) return -kInf;
        continue;
      }
      bound += d[j] * lp.lo[j];
    } else if (d[j] < 0) {
      if (!finite(lp.hi[j])) {
        if (d[j] < -tol) return -kInf;
        continue;
      }
      bound += d[j] * lp.hi[j];
    }
  }
  return bound;
}

}  // namespace mlrfe

#include "mlrfe/spatial.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <map>
#include <memory>
#include <optional>
#include <queue>

#include "mlrfe/error.hpp"

namespace mlrfe {

double McEnvelope::under(double u, double v) const {
  return std::max(lower[0].at(u, v), lower[1].at(u, v));
}

double McEnvelope::over(double u, double v) const {
  return std::min(upper[0].at(u, v), upper[1].at(u, v));
}

McEnvelope mccormick_envelope(double ul, double uu, double vl, double vu) {
  McEnvelope e{ul, uu, vl, vu, {}, {}};
  e.lower[0] = {vl, ul, -ul * vl};
  e.lower[1] = {vu, uu, -uu * vu};
  e.upper[0] = {vl, uu, -uu * vl};
  e.upper[1] = {vu, ul, -ul * vu};
  return e;
}

const char* to_string(NlpStatus status) {
  switch (status) {
    case NlpStatus::Optimal: return "Optimal";
    case NlpStatus::Infeasible: return "Infeasible";
    case NlpStatus::Unbounded: return "Unbounded";
    case NlpStatus::IterationLimit: return "IterationLimit";
  }
  return "?";
}

namespace {

// Terms sharing inputs and cell share one chain of product weights.
struct Group {
  std::vector<int> inputs;
  std::vector<double> lo, hi;
  std::vector<std::size_t> terms;
};

struct BoxNode {
  double bound;
  std::size_t id;
  std::vector<double> lo, hi;  // per branching variable
  std::shared_ptr<const LpBasis> start;  // parent's optimal basis

  bool operator>(const BoxNode& o) const {
    if (bound != o.bound) return bound > o.bound;
    return id > o.id;
  }
};

class SpatialSolver {
 public:
  SpatialSolver(const BoxNlp& nlp, const NlpOptions& opt) : nlp_(nlp), opt_(opt) {
    for (std::size_t t = 0; t < nlp.terms.size(); ++t) {
      const auto& term = nlp.terms[t];
      auto it = std::find_if(groups_.begin(), groups_.end(), [&](const Group& g) {
        return g.inputs == term.inputs && g.lo == term.lo && g.hi == term.hi;
      });
      if (it == groups_.end()) {
        groups_.push_back({term.inputs, term.lo, term.hi, {}});
        it = groups_.end() - 1;
      }
      it->terms.push_back(t);
    }
    for (const auto& g : groups_) {
      if (g.inputs.size() < 2) continue;
      const auto mixed = interacting_inputs(g);
      for (std::size_t a = 0; a < g.inputs.size(); ++a) {
        const int v = g.inputs[a];
        if (mixed[a] && !branch_index_.contains(v)) {
          branch_index_[v] = branch_vars_.size();
          branch_vars_.push_back(v);
        }
      }
    }
    for (int v : branch_vars_) {
      root_lo_.push_back(nlp.lo[v]);
      root_hi_.push_back(nlp.hi[v]);
    }
  }

  NlpResult run();

 private:
  std::vector<bool> interacting_inputs(const Group& g) const;
  LpProblem build(const std::vector<double>& blo, const std::vector<double>& bhi) const;
  void offer(std::vector<double> x);
  using OpenList = std::priority_queue<BoxNode, std::vector<BoxNode>, std::greater<>>;
  /// Bisects the widest branching variable; false once every width is below min_width.
  bool split(const BoxNode& node, double bound, std::shared_ptr<const LpBasis> start, OpenList& open,
             std::size_t& next_id) const;
  double tol(double v) const { return std::max(opt_.abs_gap, opt_.rel_gap * std::abs(v)); }

  const BoxNlp& nlp_;
  NlpOptions opt_;
  std::vector<Group> groups_;
  std::vector<int> branch_vars_;
  std::map<int, std::size_t> branch_index_;
  std::vector<double> root_lo_, root_hi_;
  std::vector<double> best_x_;
  double best_ = kInf;
};

// Inputs that appear in a monomial of degree two or more in some term of the
// group. Inputs entering only affinely are represented exactly and never need
// branching.
std::vector<bool> SpatialSolver::interacting_inputs(const Group& g) const {
  const std::size_t dims = g.inputs.size();
  std::vector<bool> mixed(dims, false);
  for (std::size_t t : g.terms) {
    std::vector<double> a = nlp_.terms[t].corners;
    double scale = 1.0;
    for (double v : a) scale = std::max(scale, std::abs(v));
    // Moebius transform: corner values to monomial coefficients. Axis k is
    // bit (dims - 1 - k) of the corner index.
    for (std::size_t bit = 1; bit < a.size(); bit <<= 1)
      for (std::size_t c = 0; c < a.size(); ++c)
        if (c & bit) a[c] -= a[c ^ bit];
    for (std::size_t s = 0; s < a.size(); ++s) {
      if (std::popcount(s) < 2 || std::abs(a[s]) <= 1e-12 * scale) continue;
      for (std::size_t k = 0; k < dims; ++k)
        if (s & (std::size_t{1} << (dims - 1 - k))) mixed[k] = true;
    }
  }
  return mixed;
}

LpProblem SpatialSolver::build(const std::vector<double>& blo, const std::vector<double>& bhi) const {
  LpProblem lp;
  const std::size_t n = nlp_.lo.size();
  for (std::size_t j = 0; j < n; ++j) lp.add_column(nlp_.lo[j], nlp_.hi[j]);
  for (std::size_t b = 0; b < branch_vars_.size(); ++b) {
    lp.lo[branch_vars_[b]] = blo[b];
    lp.hi[branch_vars_[b]] = bhi[b];
  }
  for (const auto& t : nlp_.objective.terms) lp.cost[t.var] += t.coef;
  lp.cost_offset = nlp_.objective.constant;

  for (const auto& row : nlp_.rows) {
    std::vector<int> idx;
    std::vector<double> val;
    for (const auto& t : row.terms) {
      idx.push_back(t.var);
      val.push_back(t.coef);
    }
    lp.add_row(idx, val, row.sense, row.rhs);
  }

  for (const auto& g : groups_) {
    const std::size_t dims = g.inputs.size();
    std::vector<int> theta(dims);
    std::vector<double> tl(dims), tu(dims);
    for (std::size_t a = 0; a < dims; ++a) {
      const int x = g.inputs[a];
      const double w = g.hi[a] - g.lo[a];
      tl[a] = std::clamp((lp.lo[x] - g.lo[a]) / w, 0.0, 1.0);
      tu[a] = std::clamp((lp.hi[x] - g.lo[a]) / w, 0.0, 1.0);
      tl[a] = std::min(tl[a], tu[a]);
      theta[a] = lp.add_column(tl[a], tu[a]);
      lp.add_row({x, theta[a]}, {1.0, -w}, RowSense::Eq, g.lo[a]);
    }

    std::vector<int> level;
    std::vector<double> wl, wu;
    level.push_back(lp.add_column(1.0 - tu[0], 1.0 - tl[0]));
    level.push_back(lp.add_column(tl[0], tu[0]));
    wl = {1.0 - tu[0], tl[0]};
    wu = {1.0 - tl[0], tu[0]};
    lp.add_row({level[0], theta[0]}, {1.0, 1.0}, RowSense::Eq, 1.0);
    lp.add_row({level[1], theta[0]}, {1.0, -1.0}, RowSense::Eq, 0.0);

    for (std::size_t a = 1; a < dims; ++a) {
      std::vector<int> next;
      std::vector<double> nl, nu;
      std::vector<int> ones{theta[a]};
      std::vector<double> ones_val{-1.0};
      for (std::size_t p = 0; p < level.size(); ++p) {
        const int u = level[p];
        std::array<int, 2> kids{};
        for (int c = 0; c < 2; ++c) {
          const double vl = c ? tl[a] : 1.0 - tu[a];
          const double vu = c ? tu[a] : 1.0 - tl[a];
          const int w = lp.add_column(wl[p] * vl, wu[p] * vu);
          kids[c] = w;
          next.push_back(w);
          nl.push_back(wl[p] * vl);
          nu.push_back(wu[p] * vu);
          const McEnvelope env = mccormick_envelope(wl[p], wu[p], vl, vu);
          // v = theta for c = 1 and v = 1 - theta for c = 0.
          const double sign = c ? 1.0 : -1.0;
          for (const auto& pl : env.lower) {
            lp.add_row({w, u, theta[a]}, {1.0, -pl.cu, -sign * pl.cv}, RowSense::Ge,
                       pl.c + (c ? 0.0 : pl.cv));
          }
          for (const auto& pl : env.upper) {
            lp.add_row({w, u, theta[a]}, {1.0, -pl.cu, -sign * pl.cv}, RowSense::Le,
                       pl.c + (c ? 0.0 : pl.cv));
          }
        }
        lp.add_row({kids[0], kids[1], u}, {1.0, 1.0, -1.0}, RowSense::Eq, 0.0);
        ones.push_back(kids[1]);
        ones_val.push_back(1.0);
      }
      lp.add_row(ones, ones_val, RowSense::Eq, 0.0);
      level = std::move(next);
      wl = std::move(nl);
      wu = std::move(nu);
    }

    for (std::size_t t : g.terms) {
      const auto& term = nlp_.terms[t];
      std::vector<int> idx{term.output};
      std::vector<double> val{1.0};
      for (std::size_t c = 0; c < level.size(); ++c) {
        idx.push_back(level[c]);
        val.push_back(-term.corners[c]);
      }
      lp.add_row(idx, val, RowSense::Eq, 0.0);
    }
  }
  return lp;
}

void SpatialSolver::offer(std::vector<double> x) {
  const double v = nlp_violation(nlp_, x);
  if (v > opt_.feas_tol) return;
  const double obj = nlp_objective(nlp_, x);
  if (obj < best_) {
    best_ = obj;
    best_x_ = std::move(x);
  }
}

bool SpatialSolver::split(const BoxNode& node, double bound, std::shared_ptr<const LpBasis> start,
                          OpenList& open, std::size_t& next_id) const {
  std::size_t pick = branch_vars_.size();
  double widest = opt_.min_width;
  for (std::size_t b = 0; b < branch_vars_.size(); ++b) {
    const double w = (node.hi[b] - node.lo[b]) / (root_hi_[b] - root_lo_[b]);
    if (w > widest) {
      widest = w;
      pick = b;
    }
  }
  if (pick == branch_vars_.size()) return false;
  const double mid = 0.5 * (node.lo[pick] + node.hi[pick]);
  BoxNode left{bound, next_id++, node.lo, node.hi, start};
  left.hi[pick] = mid;
  BoxNode right{bound, next_id++, node.lo, node.hi, std::move(start)};
  right.lo[pick] = mid;
  open.push(std::move(left));
  open.push(std::move(right));
  return true;
}

NlpResult SpatialSolver::run() {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  NlpResult res;
  const std::size_t n = nlp_.lo.size();

  OpenList open;
  std::size_t next_id = 0;
  open.push({-kInf, next_id++, root_lo_, root_hi_, nullptr});
  double leaf_bound = kInf;
  bool limited = false;

  while (!open.empty()) {
    if (open.top().bound >= best_ - tol(best_)) break;
    if (res.nodes >= opt_.node_limit ||
        std::chrono::duration<double>(Clock::now() - start).count() > opt_.time_limit) {
      limited = true;
      break;
    }
    BoxNode node = open.top();
    open.pop();
    ++res.nodes;

    LpResult r;
    bool lp_failed = false;
    try {
      r = solve_lp(build(node.lo, node.hi), {}, node.start.get());
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NumericalFailure) throw;
      lp_failed = true;
    }
    if (lp_failed) {
      // No information from this box; split it with the inherited bound.
      if (!split(node, node.bound, node.start, open, next_id)) leaf_bound = std::min(leaf_bound, node.bound);
      continue;
    }
    if (r.status == LpStatus::Infeasible) continue;
    if (r.status == LpStatus::Unbounded) {
      // Nonlinear variables are bounded, so any feasible point extends along
      // the unbounded ray.
      BoxNlp feas = nlp_;
      feas.objective = {};
      NlpResult f = solve_box_global(feas, opt_);
      if (f.status == NlpStatus::Optimal) {
        res.status = NlpStatus::Unbounded;
        res.x = f.x;
        res.objective = -kInf;
        res.lower_bound = -kInf;
      } else {
        res.status = f.status == NlpStatus::Infeasible ? NlpStatus::Infeasible
                                                       : NlpStatus::IterationLimit;
        res.lower_bound = f.status == NlpStatus::Infeasible ? kInf : -kInf;
      }
      return res;
    }
    const double bound = std::max(r.objective, node.bound);
    if (bound >= best_ - tol(best_)) continue;

    std::vector<double> x(r.x.begin(), r.x.begin() + static_cast<long>(n));
    for (const auto& t : nlp_.terms) x[t.output] = term_value(t, x);
    const double lp_violation = nlp_violation(nlp_, x);
    offer(x);
    if (res.nodes <= 8 || lp_violation < 1e-3 || res.nodes % 16 == 0) {
      auto local = local_solve(nlp_, x, opt_.local);
      if (local.feasible) offer(std::move(local.x));
    }
    if (bound >= best_ - tol(best_)) continue;

    if (!split(node, bound, std::make_shared<const LpBasis>(std::move(r.basis)), open, next_id)) leaf_bound = std::min(leaf_bound, bound);
  }

  double lb = std::min(best_, leaf_bound);
  if (!open.empty()) lb = std::min(lb, open.top().bound);
  res.lower_bound = lb;
  if (std::isfinite(best_)) {
    res.x = best_x_;
    res.objective = best_;
    res.status = best_ - lb <= tol(best_) ? NlpStatus::Optimal : NlpStatus::IterationLimit;
  } else {
    res.status = limited ? NlpStatus::IterationLimit : NlpStatus::Infeasible;
    if (!limited) res.lower_bound = kInf;
  }
  return res;
}

// Objective of a subproblem result, with infeasible ones last.
bool better(const NlpResult& a, const NlpResult& b) {
  auto key = [](const NlpResult& r) {
    if (r.status == NlpStatus::Unbounded) return -kInf;
    if (r.status == NlpStatus::Optimal || (r.status == NlpStatus::IterationLimit && !r.x.empty()))
      return r.objective;
    return kInf;
  };
  return key(a) < key(b);
}

OracleResult combine(const std::vector<Fixing>& fixings, const std::vector<NlpResult>& results,
                     const NlpOptions& opt) {
  OracleResult out;
  out.subproblems = fixings.size();
  std::size_t best = fixings.size();
  double lb = kInf;
  bool limited = false;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    if (r.status == NlpStatus::Unbounded) {
      out.best = r;
      out.fixing = fixings[i];
      return out;
    }
    if (r.status == NlpStatus::IterationLimit) limited = true;
    lb = std::min(lb, r.lower_bound);
    if (best == fixings.size() || better(r, results[best])) best = i;
  }
  if (best < fixings.size() && !results[best].x.empty()) {
    out.best = results[best];
    out.fixing = fixings[best];
    out.best.lower_bound = lb;
    const double gap_tol = std::max(opt.abs_gap, opt.rel_gap * std::abs(out.best.objective));
    out.best.status = (limited && out.best.objective - lb > gap_tol) ? NlpStatus::IterationLimit
                                                                     : NlpStatus::Optimal;
  } else {
    out.best.status = limited ? NlpStatus::IterationLimit : NlpStatus::Infeasible;
    out.best.lower_bound = limited ? lb : kInf;
  }
  out.best.nodes = 0;
  for (const auto& r : results) out.best.nodes += r.nodes;
  return out;
}

std::vector<Fixing> checked_fixings(const ProblemIR& ir, const OracleOptions& options) {
  const std::size_t count = fixing_count(ir);
  if (count > options.max_fixings) {
    throw Error(ErrorCode::EnumerationTooLarge,
                std::to_string(count) + " fixings exceed the limit of " +
                    std::to_string(options.max_fixings));
  }
  return enumerate_fixings(ir);
}

}  // namespace

NlpResult solve_box_global(const BoxNlp& nlp, const NlpOptions& options) {
  if (nlp.empty) return {};
  SpatialSolver solver(nlp, options);
  return solver.run();
}

std::vector<Fixing> enumerate_fixings(const ProblemIR& ir) {
  const auto bins = ir.binary_ids();
  std::vector<Fixing> out;
  for (std::size_t mask = 0; mask < (std::size_t{1} << bins.size()); ++mask) {
    Fixing base;
    for (std::size_t b = 0; b < bins.size(); ++b) base.binaries.push_back((mask >> b) & 1u);
    // Odometer over the segments of active interpolants.
    std::vector<std::vector<int>> seg;
    std::vector<std::pair<std::size_t, std::size_t>> digits;  // (interpolant, axis)
    for (std::size_t i = 0; i < ir.interpolants.size(); ++i) {
      const auto& f = ir.interpolants[i];
      bool active = true;
      if (f.activation) {
        const auto pos = std::find(bins.begin(), bins.end(), *f.activation) - bins.begin();
        active = base.binaries[pos] == 1;
      }
      const std::size_t dims = f.grid().dims();
      seg.emplace_back(dims, active ? 0 : Fixing::kInactive);
      if (active) {
        for (std::size_t j = 0; j < dims; ++j) digits.emplace_back(i, j);
      }
    }
    for (;;) {
      Fixing fx = base;
      fx.segments = seg;
      out.push_back(std::move(fx));
      std::size_t d = 0;
      for (; d < digits.size(); ++d) {
        auto [i, j] = digits[d];
        const int limit = static_cast<int>(ir.interpolants[i].grid().segments(j));
        if (++seg[i][j] < limit) break;
        seg[i][j] = 0;
      }
      if (d == digits.size()) break;
    }
  }
  return out;
}

namespace {

// Solves one fixing within what is left of the oracle's overall time budget.
NlpResult solve_fixing(const ProblemIR& ir, const Fixing& fx, const OracleOptions& options,
                       std::chrono::steady_clock::time_point start) {
  NlpOptions nlp = options.nlp;
  if (std::isfinite(options.time_limit)) {
    const double left =
        options.time_limit - std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (left <= 0.0) {
      NlpResult skipped;
      skipped.status = NlpStatus::IterationLimit;
      skipped.lower_bound = -kInf;
      return skipped;
    }
    nlp.time_limit = std::min(nlp.time_limit, left);
  }
  return solve_box_global(build_subproblem(ir, fx), nlp);
}

}  // namespace

OracleResult enumerate_oracle(const ProblemIR& ir, const OracleOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const auto fixings = checked_fixings(ir, options);
  std::vector<NlpResult> results(fixings.size());
  std::vector<std::optional<Error>> errors(fixings.size());
  const long count = static_cast<long>(fixings.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < count; ++i) {
    try {
      results[i] = solve_fixing(ir, fixings[i], options, start);
    } catch (const Error& e) {
      errors[i] = e;
    }
  }
  for (const auto& e : errors) {
    if (e) throw *e;
  }
  return combine(fixings, results, options.nlp);
}

OracleResult enumerate_oracle_serial(const ProblemIR& ir, const OracleOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const auto fixings = checked_fixings(ir, options);
  std::vector<NlpResult> results;
  results.reserve(fixings.size());
  for (const auto& fx : fixings) results.push_back(solve_fixing(ir, fx, options, start));
  return combine(fixings, results, options.nlp);
}

}  // namespace mlrfe

#include "mlrfe/bnb.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <queue>

namespace mlrfe {

const char* to_string(MipStatus status) {
  switch (status) {
    case MipStatus::Optimal: return "Optimal";
    case MipStatus::Infeasible: return "Infeasible";
    case MipStatus::Unbounded: return "Unbounded";
    case MipStatus::GapLimit: return "GapLimit";
    case MipStatus::TimeLimit: return "TimeLimit";
    case MipStatus::NodeLimit: return "NodeLimit";
  }
  return "?";
}

namespace {

struct Node {
  double bound;
  std::size_t id;
  std::vector<signed char> fixed;  // per binary: -1 free, 0 or 1

  bool operator>(const Node& o) const {
    if (bound != o.bound) return bound > o.bound;
    return id > o.id;
  }
};

}  // namespace

MipResult solve_milp(const LpProblem& lp, std::span<const int> binaries, const MipOptions& options) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - start).count(); };

  MipResult res;
  DenseSimplex lps(lp, options.lp);
  std::vector<double> base_lo(binaries.size()), base_hi(binaries.size());
  for (std::size_t b = 0; b < binaries.size(); ++b) {
    base_lo[b] = std::max(0.0, std::ceil(lp.lo[binaries[b]] - options.integrality_tol));
    base_hi[b] = std::min(1.0, std::floor(lp.hi[binaries[b]] + options.integrality_tol));
    if (base_lo[b] > base_hi[b]) {
      res.status = MipStatus::Infeasible;
      return res;
    }
  }

  auto gap_closed = [&](double inc, double bound, double rel) {
    return inc - bound <= std::max(options.abs_gap, rel * std::abs(inc));
  };

  std::priority_queue<Node, std::vector<Node>, std::greater<>> open;
  std::size_t next_id = 0;
  open.push({-kInf, next_id++, std::vector<signed char>(binaries.size(), -1)});
  bool stopped_by_limit = false;
  MipStatus limit_status = MipStatus::TimeLimit;

  while (!open.empty()) {
    if (res.has_solution()) {
      const double bound = open.top().bound;
      if (gap_closed(res.objective, bound, options.rel_gap)) break;
    }
    if (elapsed() > options.time_limit) {
      stopped_by_limit = true;
      limit_status = MipStatus::TimeLimit;
      break;
    }
    if (res.nodes >= options.node_limit) {
      stopped_by_limit = true;
      limit_status = MipStatus::NodeLimit;
      break;
    }
    Node node = open.top();
    open.pop();
    if (res.has_solution() && node.bound >= res.objective - options.abs_gap) continue;
    ++res.nodes;

    for (std::size_t b = 0; b < binaries.size(); ++b) {
      const double lo = node.fixed[b] < 0 ? base_lo[b] : node.fixed[b];
      const double hi = node.fixed[b] < 0 ? base_hi[b] : node.fixed[b];
      if (lps.lower(binaries[b]) != lo || lps.upper(binaries[b]) != hi) {
        lps.set_bounds(binaries[b], lo, hi);
      }
    }
    LpResult r = lps.solve();
    if (r.status == LpStatus::Infeasible) continue;
    if (r.status == LpStatus::Unbounded) {
      res.status = MipStatus::Unbounded;
      res.x.clear();
      res.objective = -kInf;
      res.bound = -kInf;
      return res;
    }
    const double obj = std::max(r.objective, node.bound);
    if (res.has_solution() && obj >= res.objective - options.abs_gap) continue;

    std::size_t branch = binaries.size();
    double most = options.integrality_tol;
    for (std::size_t b = 0; b < binaries.size(); ++b) {
      const double v = r.x[binaries[b]];
      const double frac = std::min(v - std::floor(v), std::ceil(v) - v);
      if (frac > most) {
        most = frac;
        branch = b;
      }
    }
    if (branch == binaries.size()) {
      res.x = r.x;
      for (int j : binaries) res.x[j] = std::round(res.x[j]);
      res.objective = r.objective;
      continue;
    }
    for (signed char v : {0, 1}) {
      Node child{obj, next_id++, node.fixed};
      child.fixed[branch] = v;
      open.push(std::move(child));
    }
  }

  double open_bound = kInf;
  if (!open.empty()) open_bound = open.top().bound;
  if (res.has_solution()) {
    res.bound = std::min(open_bound, res.objective);
    if (stopped_by_limit) {
      res.status = limit_status;
    } else if (gap_closed(res.objective, res.bound, 1e-6)) {
      res.status = MipStatus::Optimal;
    } else {
      res.status = MipStatus::GapLimit;
    }
  } else {
    res.bound = open.empty() ? kInf : open_bound;
    res.status = stopped_by_limit ? limit_status : MipStatus::Infeasible;
  }
  return res;
}

}  // namespace mlrfe

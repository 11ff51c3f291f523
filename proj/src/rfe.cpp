#include "mlrfe/rfe.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>

#include "mlrfe/error.hpp"

namespace mlrfe {

const char* to_string(RfeStatus status) {
  switch (status) {
    case RfeStatus::Optimal: return "Optimal";
    case RfeStatus::Infeasible: return "Infeasible";
    case RfeStatus::Unbounded: return "Unbounded";
    case RfeStatus::TimeLimit: return "TimeLimit";
  }
  return "?";
}

RfeResult solve_rfe(const ProblemIR& ir, const RfeOptions& options) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - start).count(); };
  auto tol = [&](double c) { return std::max(options.abs_tol, options.rel_tol * std::abs(c)); };

  RfeResult res;
  MilpModel milp = build_relaxation(ir);
  std::set<Fixing> seen;
  double incumbent = kInf;
  double bound = -kInf;
  bool exhausted = false;

  auto finish = [&](RfeStatus status) {
    res.status = status;
    res.objective = incumbent;
    res.cuts = milp.num_cuts();
    res.seconds = elapsed();
    return res;
  };

  while (true) {
    if (elapsed() > options.time_limit || res.trace.size() >= options.max_iterations) {
      res.bound = bound;
      return finish(RfeStatus::TimeLimit);
    }
    MipOptions mip_opt = options.mip;
    mip_opt.time_limit = std::min(mip_opt.time_limit, options.time_limit - elapsed());
    MipResult mip = solve_relaxation(milp, mip_opt);

    double milp_bound;
    std::vector<double> point;
    if (mip.status == MipStatus::Infeasible) {
      exhausted = true;
      break;
    }
    if (mip.status == MipStatus::Unbounded) {
      // No finite bound yet; pick any cell the relaxation admits.
      MilpModel feas = milp;
      std::fill(feas.lp.cost.begin(), feas.lp.cost.end(), 0.0);
      MipResult any = solve_relaxation(feas, mip_opt);
      if (any.status == MipStatus::Infeasible) {
        exhausted = true;
        break;
      }
      if (!any.has_solution()) {
        res.bound = bound;
        return finish(RfeStatus::TimeLimit);
      }
      milp_bound = -kInf;
      point = std::move(any.x);
    } else if (mip.status == MipStatus::Optimal || mip.status == MipStatus::GapLimit) {
      milp_bound = mip.bound;
      point = std::move(mip.x);
    } else {
      res.bound = std::max(bound, mip.bound);
      return finish(RfeStatus::TimeLimit);
    }
    bound = std::max(bound, milp_bound);

    // Terminate once the relaxation cannot beat the incumbent; inf vs inf is false.
    const bool improvable =
        std::isinf(incumbent) ? milp_bound < incumbent : milp_bound < incumbent - tol(incumbent);
    if (!improvable) break;

    Fixing fixing = extract_fixing(ir, milp, point);
    if (!seen.insert(fixing).second) {
      throw Error(ErrorCode::NumericalFailure,
                  "relaxation returned an excluded cell again: " + describe(fixing));
    }
    NlpOptions nlp_opt = options.nlp;
    nlp_opt.time_limit = std::min(nlp_opt.time_limit, options.time_limit - elapsed());
    NlpResult nlp = solve_box_global(build_subproblem(ir, fixing), nlp_opt);

    RfeIteration it;
    it.milp_bound = milp_bound;
    it.dual_bound = bound;
    it.nlp_status = nlp.status;
    it.nlp_objective = nlp.objective;
    it.fixing = fixing;

    if (nlp.status == NlpStatus::Unbounded) {
      res.x = nlp.x;
      incumbent = -kInf;
      it.incumbent = incumbent;
      it.seconds = elapsed();
      res.trace.push_back(std::move(it));
      res.bound = -kInf;
      return finish(RfeStatus::Unbounded);
    }
    if (!nlp.x.empty() && nlp.objective < incumbent) {
      incumbent = nlp.objective;
      res.x = nlp.x;
    }
    it.incumbent = incumbent;
    it.seconds = elapsed();
    res.trace.push_back(std::move(it));
    if (nlp.status == NlpStatus::IterationLimit) {
      res.bound = bound;
      return finish(RfeStatus::TimeLimit);
    }
    add_no_good_cut(milp, ir, fixing);
  }

  if (std::isinf(incumbent)) {
    res.bound = kInf;
    return finish(RfeStatus::Infeasible);
  }
  // Either every cell is excluded or the relaxation bound meets the incumbent.
  res.bound = exhausted ? incumbent : std::min(bound, incumbent);
  return finish(RfeStatus::Optimal);
}

}  // namespace mlrfe

#include "mlrfe/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

namespace mlrfe {

namespace {

using Json = nlohmann::ordered_json;

Json number(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string fmt_gap(double g) {
  if (!std::isfinite(g)) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", g);
  return buf;
}

Json report_json(const RunReport& r) {
  Json j;
  j["solver"] = r.solver;
  j["instance"] = r.instance;
  j["status"] = r.status;
  j["objective"] = number(r.objective);
  j["bound"] = number(r.bound);
  j["gap"] = number(r.gap);
  j["iterations"] = r.iterations;
  j["nodes"] = r.nodes;
  j["cuts"] = r.cuts;
  j["seconds"] = r.seconds;
  Json sol = Json::object();
  for (std::size_t i = 0; i < r.x.size(); ++i) sol[r.names[i]] = r.x[i];
  j["solution"] = std::move(sol);
  Json tr = Json::array();
  for (const auto& t : r.trace) {
    tr.push_back(Json{{"iteration", t.iteration},
                      {"seconds", t.seconds},
                      {"milp_bound", number(t.milp_bound)},
                      {"dual_bound", number(t.dual_bound)},
                      {"incumbent", number(t.incumbent)},
                      {"nlp_status", t.nlp_status},
                      {"fixing", t.fixing}});
  }
  j["trace"] = std::move(tr);
  return j;
}

std::vector<std::string> names_of(const ProblemIR& ir) {
  std::vector<std::string> out;
  for (const auto& v : ir.variables) out.push_back(v.name);
  return out;
}

}  // namespace

double relative_gap(double incumbent, double bound) {
  if (!std::isfinite(incumbent) || !std::isfinite(bound)) return kInf;
  return std::max(0.0, incumbent - bound) / std::max(1.0, std::abs(incumbent));
}

RunReport make_report(const ProblemIR& ir, const RfeResult& result) {
  RunReport r;
  r.solver = "rfe";
  r.status = to_string(result.status);
  r.objective = ir.user_objective(result.objective);
  r.bound = ir.user_objective(result.bound);
  r.gap = relative_gap(result.objective, result.bound);
  r.iterations = result.trace.size();
  r.cuts = result.cuts;
  r.seconds = result.seconds;
  if (!result.x.empty()) {
    r.names = names_of(ir);
    r.x = result.x;
  }
  for (std::size_t i = 0; i < result.trace.size(); ++i) {
    const auto& it = result.trace[i];
    r.trace.push_back({i + 1, it.seconds, ir.user_objective(it.milp_bound),
                       ir.user_objective(it.dual_bound), ir.user_objective(it.incumbent),
                       to_string(it.nlp_status), describe(it.fixing)});
  }
  return r;
}

RunReport make_report(const ProblemIR& ir, const OracleResult& result, double seconds) {
  RunReport r;
  r.solver = "oracle";
  r.status = to_string(result.best.status);
  r.objective = ir.user_objective(result.best.objective);
  r.bound = ir.user_objective(result.best.lower_bound);
  r.gap = relative_gap(result.best.objective, result.best.lower_bound);
  r.iterations = result.subproblems;
  r.nodes = result.best.nodes;
  r.seconds = seconds;
  if (!result.best.x.empty()) {
    r.names = names_of(ir);
    r.x = result.best.x;
  }
  return r;
}

int exit_code(const RunReport& report) {
  if (report.status == "Optimal") return kExitOptimal;
  if (report.status == "Infeasible") return kExitInfeasible;
  if (report.status == "Unbounded") return kExitUnbounded;
  return kExitLimit;
}

std::string to_json(const RunReport& report) { return report_json(report).dump(2) + "\n"; }

std::string to_text(const RunReport& r) {
  std::ostringstream s;
  s << "solver     " << r.solver << "\n";
  if (!r.instance.empty()) s << "instance   " << r.instance << "\n";
  s << "status     " << r.status << "\n";
  s << "objective  " << fmt(r.objective) << "\n";
  s << "bound      " << fmt(r.bound) << "\n";
  s << "gap        " << fmt_gap(r.gap) << "\n";
  s << "iterations " << r.iterations << "\n";
  s << "nodes      " << r.nodes << "\n";
  s << "cuts       " << r.cuts << "\n";
  s << "seconds    " << fmt(r.seconds) << "\n";
  if (!r.trace.empty()) {
    s << "\n  iter   seconds        dual_bound         incumbent  nlp\n";
    for (const auto& t : r.trace) {
      char line[160];
      std::snprintf(line, sizeof line, "%6zu %9.3f %17.9g %17.9g  %s\n", t.iteration, t.seconds,
                    t.dual_bound, t.incumbent, t.nlp_status.c_str());
      s << line;
    }
  }
  return s.str();
}

bool BatchRow::engines_agree() const {
  if (!error.empty()) return false;
  if (rfe.status == "Optimal" && oracle.status == "Optimal") {
    const double d = std::abs(rfe.objective - oracle.objective);
    return d <= std::max(1e-6, 1e-6 * std::abs(oracle.objective));
  }
  return rfe.status == oracle.status;
}

BatchSummary summarize(std::vector<BatchRow> rows) {
  BatchSummary s;
  s.rows = std::move(rows);
  std::size_t timed = 0;
  std::size_t gaps = 0;
  for (const auto& r : s.rows) {
    if (!r.error.empty()) continue;
    ++timed;
    s.mean_rfe_seconds += r.rfe.seconds;
    s.mean_oracle_seconds += r.oracle.seconds;
    if (std::isfinite(r.rfe.gap)) {
      s.mean_rfe_gap += r.rfe.gap;
      ++gaps;
    }
    if (r.rfe.status == "Optimal") ++s.solved;
    if (r.engines_agree()) ++s.agreeing;
  }
  if (timed > 0) {
    s.mean_rfe_seconds /= static_cast<double>(timed);
    s.mean_oracle_seconds /= static_cast<double>(timed);
  }
  if (gaps > 0) s.mean_rfe_gap /= static_cast<double>(gaps);
  return s;
}

std::string to_json(const BatchSummary& s) {
  Json rows = Json::array();
  for (const auto& r : s.rows) {
    Json j{{"instance", r.instance}};
    if (!r.error.empty()) {
      j["error"] = r.error;
    } else {
      for (const auto* rep : {&r.rfe, &r.oracle}) {
        j[rep->solver] = Json{{"status", rep->status},
                              {"objective", number(rep->objective)},
                              {"gap", number(rep->gap)},
                              {"seconds", rep->seconds}};
      }
      j["agree"] = r.engines_agree();
    }
    rows.push_back(std::move(j));
  }
  Json doc;
  doc["rows"] = std::move(rows);
  doc["aggregate"] = Json{{"instances", s.rows.size()},
                          {"solved", s.solved},
                          {"agreeing", s.agreeing},
                          {"mean_rfe_seconds", s.mean_rfe_seconds},
                          {"mean_oracle_seconds", s.mean_oracle_seconds},
                          {"mean_rfe_gap", s.mean_rfe_gap}};
  return doc.dump(2) + "\n";
}

std::string to_text(const BatchSummary& s) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof line, "%-24s %-14s %16s %10s %9s   %-14s %16s %9s  %s\n", "instance",
                "rfe", "objective", "gap", "seconds", "oracle", "objective", "seconds", "agree");
  out << line;
  for (const auto& r : s.rows) {
    if (!r.error.empty()) {
      out << r.instance << "  error: " << r.error << "\n";
      continue;
    }
    std::snprintf(line, sizeof line, "%-24s %-14s %16.9g %10s %9.3f   %-14s %16.9g %9.3f  %s\n",
                  r.instance.c_str(), r.rfe.status.c_str(), r.rfe.objective, fmt_gap(r.rfe.gap).c_str(),
                  r.rfe.seconds, r.oracle.status.c_str(), r.oracle.objective, r.oracle.seconds,
                  r.engines_agree() ? "yes" : "no");
    out << line;
  }
  std::snprintf(line, sizeof line, "%-24s %zu/%zu solved %20s %10s %9.3f   %-14s %16s %9.3f  %zu/%zu\n",
                "mean", s.solved, s.rows.size(), "", fmt_gap(s.mean_rfe_gap).c_str(), s.mean_rfe_seconds,
                "", "", s.mean_oracle_seconds, s.agreeing, s.rows.size());
  out << line;
  return out.str();
}

}  // namespace mlrfe

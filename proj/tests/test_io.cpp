#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include <json.hpp>

#include "mlrfe/error.hpp"
#include "mlrfe/export.hpp"
#include "mlrfe/instance_io.hpp"
#include "mlrfe/random_instance.hpp"
#include "mlrfe/report.hpp"

using namespace mlrfe;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no exception");
  return ErrorCode::ParseError;
}

ProblemIR one_axis_instance() {
  ProblemBuilder b;
  int x = b.add_continuous("x", 0, 3);
  int f = b.add_continuous("f", -10, 10);
  int y = b.add_binary("on");
  b.add_interpolant("h", {x}, {{make_table(make_grid({{0, 1, 2, 3}}), {2, 0, 1, -1}), f}}, y);
  b.add_constraint("cap", {{1.0, x}, {-1.0, y}}, RowSense::Ge, -0.5);
  b.maximize({{-1.0, f}, {0.25, x}}, 1.5);
  return b.build();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream s(text);
  for (std::string l; std::getline(s, l);) out.push_back(l);
  return out;
}

/// Column names in the COLUMNS section of an MPS file, marker lines skipped.
std::set<std::string> mps_columns(const std::string& text) {
  std::set<std::string> cols;
  bool in = false;
  for (const auto& l : lines_of(text)) {
    if (!l.empty() && l[0] != ' ') {
      in = l.rfind("COLUMNS", 0) == 0;
      continue;
    }
    if (!in || l.find("'MARKER'") != std::string::npos) continue;
    std::istringstream s(l);
    std::string name;
    s >> name;
    cols.insert(name);
  }
  return cols;
}

std::size_t lp_bound_lines(const std::string& text) {
  std::size_t n = 0;
  bool in = false;
  for (const auto& l : lines_of(text)) {
    if (l == "Bounds") {
      in = true;
    } else if (!l.empty() && l[0] != ' ') {
      in = false;
    } else if (in) {
      ++n;
    }
  }
  return n;
}

}  // namespace

TEST_CASE("instance text is a fixed point of parse and serialize") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    CAPTURE(seed);
    Instance inst{random_instance(seed), std::nullopt, seed};
    const std::string a = serialize_instance(inst);
    const Instance back = parse_instance(a);
    CHECK(serialize_instance(back) == a);
    CHECK(back.seed == seed);
    const auto& p = inst.problem;
    const auto& q = back.problem;
    REQUIRE(q.variables.size() == p.variables.size());
    CHECK(q.negated == p.negated);
    for (std::size_t i = 0; i < p.interpolants.size(); ++i)
      for (std::size_t o = 0; o < p.interpolants[i].outputs.size(); ++o)
        CHECK(q.interpolants[i].outputs[o].table.values == p.interpolants[i].outputs[o].table.values);
  }
}

TEST_CASE("maximisation survives a round trip") {
  const ProblemIR ir = one_axis_instance();
  const Instance back = parse_instance(serialize_instance({ir, std::nullopt, 3}));
  CHECK(back.problem.negated);
  std::vector<double> x{1.5, 0.5, 1.0};
  CHECK(back.problem.objective_value(x) == doctest::Approx(ir.objective_value(x)));
  auto doc = nlohmann::json::parse(serialize_instance({ir, std::nullopt, 3}));
  CHECK(doc["problem"]["sense"] == "maximize");
  CHECK(doc["problem"]["objective"]["constant"] == 1.5);
}

TEST_CASE("scenario metadata regenerates the same instance") {
  const Scenario& sc = find_scenario("S4");
  const Instance a = generate_opo({sc.id, sc.shape()}, 11);
  const Instance back = parse_instance(serialize_instance(a));
  REQUIRE(back.scenario);
  CHECK(back.scenario->id == "S4");
  CHECK(back.scenario->shape.wells == 4);
  CHECK(back.scenario->shape.manifolds == 1);
  const Instance again = generate_opo(*back.scenario, back.seed);
  CHECK(serialize_instance(again) == serialize_instance(a));
}

TEST_CASE("malformed instance documents are refused") {
  const std::string good = serialize_instance({random_instance(2), std::nullopt, 2});
  auto with = [&](auto edit) {
    auto doc = nlohmann::ordered_json::parse(good);
    edit(doc);
    return doc.dump();
  };
  CHECK(code_of([&] { parse_instance("{not json"); }) == ErrorCode::ParseError);
  CHECK(code_of([&] { parse_instance(with([](auto& d) { d.erase("version"); })); }) ==
        ErrorCode::ParseError);
  CHECK(code_of([&] { parse_instance(with([](auto& d) { d["version"] = 99; })); }) ==
        ErrorCode::ParseError);
  CHECK(code_of([&] {
          parse_instance(with([](auto& d) { d["problem"]["tables"][0]["ordering"] = "first-fastest"; }));
        }) == ErrorCode::ParseError);
  CHECK(code_of([&] {
          parse_instance(with([](auto& d) { d["problem"]["tables"][0]["values"].erase(0); }));
        }) == ErrorCode::ParseError);
}

TEST_CASE("exported column counts match the relaxation size") {
  const Scenario& sc = find_scenario("S1");
  const ProblemIR ir = build_opo_instance(sc.shape(), 7);
  const MilpModel m = build_relaxation(ir);
  const std::size_t cols = problem_size(ir).columns;
  CHECK(m.lp.num_cols() == cols);
  CHECK(mps_columns(export_milp(m, ExportFormat::FixedMps)).size() == cols);
  CHECK(mps_columns(export_milp(m, ExportFormat::FreeMps)).size() == cols);
  CHECK(lp_bound_lines(export_milp(m, ExportFormat::Lp)) == cols);
}

TEST_CASE("fixed MPS fields stay in their columns") {
  const MilpModel m = build_relaxation(one_axis_instance());
  bool in_columns = false;
  for (const auto& l : lines_of(export_milp(m, ExportFormat::FixedMps))) {
    if (!l.empty() && l[0] != ' ') {
      in_columns = l == "COLUMNS";
      continue;
    }
    if (!in_columns || l.find("MARKER") != std::string::npos) continue;
    REQUIRE(l.size() >= 25);
    CHECK(l.substr(0, 4) == "    ");
    CHECK(l[4] == 'C');
    CHECK((l[14] == 'R' || l.substr(14, 4) == "COST"));
    CHECK(l[24] != ' ');
    CHECK(l.size() <= 61);
  }
}

TEST_CASE("one-axis export ties each corner weight to its axis weight") {
  const MilpModel m = build_relaxation(one_axis_instance());
  const std::string lp = export_milp(m, ExportFormat::Lp);
  std::size_t found = 0;
  for (const auto& l : lines_of(lp)) {
    if (l.rfind(" marg_h_0_", 0) != 0) continue;
    const std::string k = l.substr(10, l.find(':') - 10);
    CHECK(l == " marg_h_0_" + k + ": xi_h_0_" + k + " - lam_h_" + k + " = 0");
    ++found;
  }
  CHECK(found == 4);
  CHECK(lp.find("Binaries") != std::string::npos);
}

TEST_CASE("export format names") {
  CHECK(parse_export_format("mps") == ExportFormat::FixedMps);
  CHECK(parse_export_format("free-mps") == ExportFormat::FreeMps);
  CHECK(parse_export_format("lp") == ExportFormat::Lp);
  CHECK(code_of([] { parse_export_format("nl"); }) == ErrorCode::UnsupportedFormat);
}

TEST_CASE("relative gap") {
  CHECK(relative_gap(10.0, 9.0) == doctest::Approx(0.1));
  CHECK(relative_gap(0.5, 0.25) == doctest::Approx(0.25));
  CHECK(relative_gap(-4.0, -6.0) == doctest::Approx(0.5));
  CHECK(relative_gap(3.0, 3.5) == 0.0);
  CHECK(std::isinf(relative_gap(kInf, 1.0)));
  CHECK(std::isinf(relative_gap(1.0, -kInf)));
}

TEST_CASE("batch summary keeps every row and aggregates") {
  auto rep = [](std::string solver, std::string status, double obj, double secs) {
    RunReport r;
    r.solver = std::move(solver);
    r.status = std::move(status);
    r.objective = obj;
    r.bound = obj;
    r.gap = r.status == "Optimal" ? 0.0 : kInf;
    r.seconds = secs;
    return r;
  };
  std::vector<BatchRow> rows(3);
  rows[0] = {"a", rep("rfe", "Optimal", 5.0, 1.0), rep("oracle", "Optimal", 5.0 + 1e-8, 2.0), ""};
  rows[1] = {"b", rep("rfe", "Infeasible", 0.0, 3.0), rep("oracle", "Infeasible", 0.0, 4.0), ""};
  rows[2] = {"c", rep("rfe", "TimeLimit", 7.0, 5.0), rep("oracle", "Optimal", 6.0, 6.0), ""};
  const BatchSummary s = summarize(rows);
  CHECK(s.rows.size() == 3);
  CHECK(s.solved == 1);
  CHECK(s.agreeing == 2);
  CHECK(s.mean_rfe_seconds == doctest::Approx(3.0));
  CHECK(s.mean_oracle_seconds == doctest::Approx(4.0));
  CHECK(s.mean_rfe_gap == 0.0);

  auto doc = nlohmann::json::parse(to_json(s));
  REQUIRE(doc["rows"].size() == 3);
  CHECK(doc["rows"][1]["rfe"]["status"] == "Infeasible");
  CHECK(doc["rows"][2]["rfe"]["status"] == "TimeLimit");
  CHECK(doc["rows"][2]["rfe"]["gap"] == "inf");
  CHECK(doc["aggregate"]["instances"] == 3);

  const auto text = lines_of(to_text(s));
  CHECK(text.size() == 5);
  CHECK(text.back().rfind("mean", 0) == 0);
}

TEST_CASE("exit codes follow the status") {
  RunReport r;
  r.status = "Optimal";
  CHECK(exit_code(r) == 0);
  r.status = "Infeasible";
  CHECK(exit_code(r) == 3);
  r.status = "TimeLimit";
  CHECK(exit_code(r) == 4);
  r.status = "IterationLimit";
  CHECK(exit_code(r) == 4);
  r.status = "Unbounded";
  CHECK(exit_code(r) == 5);
}

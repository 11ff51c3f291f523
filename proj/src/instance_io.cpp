#include "mlrfe/instance_io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "mlrfe/error.hpp"

namespace mlrfe {

namespace {

using Json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& what) { throw Error(ErrorCode::ParseError, what); }

// JSON has no infinities; unbounded sides are spelled out.
Json bound_to_json(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double bound_from_json(const Json& j) {
  if (j.is_string()) {
    if (j == "inf") return std::numeric_limits<double>::infinity();
    if (j == "-inf") return -std::numeric_limits<double>::infinity();
    fail("bad bound " + j.dump());
  }
  if (!j.is_number()) fail("bound is not a number: " + j.dump());
  return j.get<double>();
}

const char* sense_token(RowSense s) {
  switch (s) {
    case RowSense::Le: return "<=";
    case RowSense::Eq: return "==";
    case RowSense::Ge: return ">=";
  }
  return "?";
}

RowSense sense_from(const std::string& s) {
  if (s == "<=") return RowSense::Le;
  if (s == "==") return RowSense::Eq;
  if (s == ">=") return RowSense::Ge;
  fail("unknown row sense '" + s + "'");
}

Json terms_to_json(const std::vector<LinTerm>& terms, double sign = 1.0) {
  Json a = Json::array();
  for (const auto& t : terms) a.push_back(Json::array({sign * t.coef, t.var}));
  return a;
}

std::vector<LinTerm> terms_from_json(const Json& j) {
  std::vector<LinTerm> out;
  for (const auto& t : j) {
    if (!t.is_array() || t.size() != 2) fail("term must be [coef, var]");
    out.push_back({t[0].get<double>(), t[1].get<int>()});
  }
  return out;
}

Json shape_to_json(const OpoShape& s) {
  return Json{{"wells", s.wells},
              {"manifolds", s.manifolds},
              {"well_grid", s.grids.well},
              {"manifold_grid", s.grids.manifold}};
}

OpoShape shape_from_json(const Json& j) {
  OpoShape s;
  s.wells = j.at("wells").get<std::size_t>();
  s.manifolds = j.at("manifolds").get<std::size_t>();
  s.grids.well = j.at("well_grid").get<std::array<std::size_t, 3>>();
  s.grids.manifold = j.at("manifold_grid").get<std::array<std::size_t, 4>>();
  return s;
}

Json problem_to_json(const ProblemIR& ir) {
  // The file states the objective the way the user posed it.
  const double sign = ir.negated ? -1.0 : 1.0;
  Json p;
  p["sense"] = ir.negated ? "maximize" : "minimize";

  Json vars = Json::array();
  for (const auto& v : ir.variables) {
    vars.push_back(Json{{"name", v.name},
                        {"kind", v.kind == VarKind::Binary ? "binary" : "continuous"},
                        {"lo", bound_to_json(v.lo)},
                        {"hi", bound_to_json(v.hi)}});
  }
  p["variables"] = std::move(vars);

  Json rows = Json::array();
  for (const auto& c : ir.constraints) {
    rows.push_back(Json{{"name", c.name},
                        {"terms", terms_to_json(c.terms)},
                        {"sense", sense_token(c.sense)},
                        {"rhs", c.rhs}});
  }
  p["constraints"] = std::move(rows);

  Json tables = Json::array();
  Json interps = Json::array();
  for (const auto& f : ir.interpolants) {
    Json outs = Json::array();
    for (const auto& o : f.outputs) {
      outs.push_back(Json{{"table", tables.size()}, {"var", o.var}});
      tables.push_back(Json{{"axes", o.table.grid.axes()},
                            {"ordering", kTableOrdering},
                            {"values", o.table.values}});
    }
    Json d{{"name", f.name}, {"inputs", f.inputs}, {"outputs", std::move(outs)}};
    d["activation"] = f.activation ? Json(*f.activation) : Json(nullptr);
    interps.push_back(std::move(d));
  }
  p["tables"] = std::move(tables);
  p["interpolants"] = std::move(interps);
  p["objective"] = Json{{"terms", terms_to_json(ir.objective.terms, sign)},
                        {"constant", sign * ir.objective.constant}};
  return p;
}

ProblemIR problem_from_json(const Json& p) {
  ProblemDescription d;
  const std::string sense = p.at("sense").get<std::string>();
  if (sense == "maximize") {
    d.sense = ObjectiveSense::Maximize;
  } else if (sense != "minimize") {
    fail("unknown objective sense '" + sense + "'");
  }

  for (const auto& v : p.at("variables")) {
    Variable var;
    var.name = v.at("name").get<std::string>();
    const std::string kind = v.at("kind").get<std::string>();
    if (kind == "binary") {
      var.kind = VarKind::Binary;
    } else if (kind != "continuous") {
      fail("unknown variable kind '" + kind + "'");
    }
    var.lo = bound_from_json(v.at("lo"));
    var.hi = bound_from_json(v.at("hi"));
    d.variables.push_back(std::move(var));
  }

  for (const auto& c : p.at("constraints")) {
    d.constraints.push_back({c.at("name").get<std::string>(), terms_from_json(c.at("terms")),
                             sense_from(c.at("sense").get<std::string>()),
                             c.at("rhs").get<double>()});
  }

  std::vector<LookupTable> tables;
  for (const auto& t : p.at("tables")) {
    if (t.at("ordering") != kTableOrdering) fail("unsupported table ordering " + t.at("ordering").dump());
    tables.push_back(make_table(make_grid(t.at("axes").get<std::vector<std::vector<double>>>()),
                                t.at("values").get<std::vector<double>>()));
  }

  for (const auto& f : p.at("interpolants")) {
    InterpolantDef def;
    def.name = f.at("name").get<std::string>();
    def.inputs = f.at("inputs").get<std::vector<int>>();
    for (const auto& o : f.at("outputs")) {
      const auto k = o.at("table").get<std::size_t>();
      if (k >= tables.size()) fail("table index out of range in " + def.name);
      def.outputs.push_back({tables[k], o.at("var").get<int>()});
    }
    if (!f.at("activation").is_null()) def.activation = f.at("activation").get<int>();
    d.interpolants.push_back(std::move(def));
  }

  const Json& obj = p.at("objective");
  d.objective.terms = terms_from_json(obj.at("terms"));
  d.objective.constant = obj.at("constant").get<double>();
  return build_problem(std::move(d));
}

}  // namespace

std::string serialize_instance(const Instance& instance) {
  Json doc;
  doc["format"] = "mlrfe-instance";
  doc["version"] = kInstanceVersion;
  doc["seed"] = instance.seed;
  if (instance.scenario) {
    Json sc{{"id", instance.scenario->id}};
    sc.update(shape_to_json(instance.scenario->shape));
    doc["scenario"] = std::move(sc);
  } else {
    doc["scenario"] = nullptr;
  }
  doc["problem"] = problem_to_json(instance.problem);
  return doc.dump(1) + "\n";
}

Instance parse_instance(std::string_view text) {
  try {
    const Json doc = Json::parse(text);
    if (doc.at("format") != "mlrfe-instance") fail("not an instance file");
    if (!doc.contains("version")) fail("missing version");
    const int version = doc.at("version").get<int>();
    if (version != kInstanceVersion) fail("unsupported version " + std::to_string(version));
    Instance inst;
    inst.seed = doc.at("seed").get<std::uint64_t>();
    if (const Json& sc = doc.at("scenario"); !sc.is_null()) {
      inst.scenario = ScenarioMeta{sc.at("id").get<std::string>(), shape_from_json(sc)};
    }
    inst.problem = problem_from_json(doc.at("problem"));
    return inst;
  } catch (const Json::exception& e) {
    fail(e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ParseError) throw;
    fail(std::string("invalid problem: ") + e.what());
  }
}

void write_instance(const std::filesystem::path& path, const Instance& instance) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::ParseError, "cannot write " + path.string());
  out << serialize_instance(instance);
  if (!out) throw Error(ErrorCode::ParseError, "write failed for " + path.string());
}

Instance read_instance(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_instance(ss.str());
}

Instance generate_opo(const ScenarioMeta& scenario, std::uint64_t seed) {
  return {build_opo_instance(scenario.shape, seed), scenario, seed};
}

}  // namespace mlrfe

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"
#include "mlrfe/instance_io.hpp"
#include "mlrfe/random_instance.hpp"

using namespace mlrfe;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "mlrfe_cli_tests";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

std::string infeasible_instance() {
  ProblemBuilder b;
  int x = b.add_continuous("x", 0, 2);
  int y = b.add_continuous("y", 0, 1);
  int f = b.add_continuous("f", -20, 20);
  b.add_interpolant("g", {x, y}, {{make_table(make_grid({{0, 1, 2}, {0, 1}}), {1, 2, 3, 0, 4, 2}), f}});
  b.add_constraint("low", {{1.0, f}}, RowSense::Le, -1.0);
  b.minimize({{1.0, f}});
  const fs::path p = scratch("infeasible.json");
  write_instance(p, {b.build(), std::nullopt, 0});
  return p.string();
}

}  // namespace

TEST_CASE("generate is deterministic per seed") {
  const auto a = scratch("s1_a.json");
  const auto b = scratch("s1_b.json");
  CHECK(cli({"generate", "--scenario", "S1", "--seed", "7", "-o", a.string()}).code == 0);
  CHECK(cli({"generate", "--scenario", "S1", "--seed", "7", "-o", b.string()}).code == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(cli({"generate", "--scenario", "S1", "--seed", "8"}).out != slurp(a));
}

TEST_CASE("generated S9 metadata") {
  const Run r = cli({"generate", "--scenario", "S9", "--seed", "1"});
  REQUIRE(r.code == 0);
  const auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["scenario"]["id"] == "S9");
  CHECK(doc["scenario"]["wells"] == 9);
  CHECK(doc["scenario"]["manifolds"] == 2);
  CHECK(doc["seed"] == 1);
}

TEST_CASE("invalid generator input exits 2") {
  Run r = cli({"generate", "--scenario", "S10"});
  CHECK(r.code == 2);
  CHECK_FALSE(r.err.empty());
  CHECK(cli({"generate", "--wells", "0", "--manifolds", "1"}).code == 2);
  CHECK(cli({"generate", "--wells", "2", "--manifolds", "1", "--well-grid", "1", "3", "3"}).code == 2);
  CHECK(cli({"frobnicate"}).code == 2);
}

TEST_CASE("both engines agree on a small instance") {
  const auto p = scratch("tiny.json");
  write_instance(p, {random_instance(1004), std::nullopt, 1004});
  const Run a = cli({"solve", p.string(), "--engine", "rfe"});
  const Run b = cli({"solve", p.string(), "--engine", "oracle"});
  REQUIRE(a.code == 0);
  REQUIRE(b.code == 0);
  const auto ra = nlohmann::json::parse(a.out);
  const auto rb = nlohmann::json::parse(b.out);
  CHECK(ra["status"] == "Optimal");
  CHECK(rb["status"] == "Optimal");
  CHECK(std::abs(ra["objective"].get<double>() - rb["objective"].get<double>()) <= 1e-6);
  CHECK(ra["gap"].get<double>() >= 0.0);
  CHECK_FALSE(ra["trace"].empty());
  CHECK(ra["trace"][0].contains("dual_bound"));
}

TEST_CASE("infeasible instance exits 3") {
  const std::string p = infeasible_instance();
  for (const char* engine : {"rfe", "oracle"}) {
    const Run r = cli({"solve", p, "--engine", engine});
    CHECK(r.code == 3);
    CHECK(nlohmann::json::parse(r.out)["status"] == "Infeasible");
  }
}

TEST_CASE("a tiny time limit exits 4 and still reports a bound") {
  const auto p = scratch("s9.json");
  REQUIRE(cli({"generate", "--scenario", "S9", "--seed", "1", "-o", p.string()}).code == 0);
  const Run r = cli({"solve", p.string(), "--time-limit", "0.001"});
  CHECK(r.code == 4);
  const auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["status"] == "TimeLimit");
  CHECK(doc.contains("bound"));
  CHECK_FALSE(doc["bound"].is_null());
}

TEST_CASE("unreadable instances exit 2") {
  const auto p = scratch("broken.json");
  std::ofstream(p) << "{\"format\": \"mlrfe-instance\", \"version\": 1";
  CHECK(cli({"solve", p.string()}).code == 2);
  CHECK(cli({"solve", scratch("missing.json").string()}).code == 2);
}

TEST_CASE("export formats") {
  const auto p = scratch("s1_export.json");
  REQUIRE(cli({"generate", "--scenario", "S1", "--seed", "7", "-o", p.string()}).code == 0);
  const Run mps = cli({"export", p.string()});
  CHECK(mps.code == 0);
  CHECK(mps.out.rfind("NAME", 0) == 0);
  CHECK(mps.out.find("ENDATA") != std::string::npos);
  const Run lp = cli({"export", p.string(), "--format", "lp"});
  CHECK(lp.code == 0);
  CHECK(lp.out.find("Subject To") != std::string::npos);
  const Run bad = cli({"export", p.string(), "--format", "gams"});
  CHECK(bad.code == 2);
  CHECK_FALSE(bad.err.empty());
}

TEST_CASE("bench tabulates both engines per instance") {
  const Run r = cli({"bench", "--count", "3", "--seed", "1010"});
  REQUIRE(r.code == 0);
  const auto doc = nlohmann::json::parse(r.out);
  REQUIRE(doc["rows"].size() == 3);
  for (const auto& row : doc["rows"]) CHECK(row["agree"] == true);
  CHECK(doc["aggregate"]["agreeing"] == 3);

  const Run text = cli({"bench", "--count", "3", "--seed", "1010", "--format", "text"});
  std::size_t lines = 0;
  for (char c : text.out) lines += c == '\n';
  CHECK(lines == 5);
}

TEST_CASE("bench keeps going past a failing instance") {
  const auto good = scratch("bench_ok.json");
  write_instance(good, {random_instance(1011), std::nullopt, 1011});
  const Run r = cli({"bench", good.string(), scratch("nope.json").string(), infeasible_instance()});
  REQUIRE(r.code == 0);
  const auto doc = nlohmann::json::parse(r.out);
  REQUIRE(doc["rows"].size() == 3);
  CHECK(doc["rows"][0]["agree"] == true);
  CHECK(doc["rows"][1].contains("error"));
  CHECK(doc["rows"][2]["rfe"]["status"] == "Infeasible");
  CHECK(doc["rows"][2]["oracle"]["status"] == "Infeasible");
}

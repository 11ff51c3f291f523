#include <doctest.h>

#include <array>
#include <chrono>
#include <cmath>

#include "mlrfe/error.hpp"
#include "mlrfe/opo.hpp"
#include "mlrfe/rfe.hpp"
#include "mlrfe/spatial.hpp"

using namespace mlrfe;

namespace {

Grid well_grid() {
  return make_grid({{0, 100, 250, 400}, {15, 80, 150, 220}, {0, 0.5, 1.2, 2.0}});
}

double var(const ProblemIR& ir, const std::vector<double>& x, const std::string& name) {
  return x[ir.find_variable(name)];
}

}  // namespace

TEST_CASE("well tables rise with downstream pressure") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto t = synth_vlp(seed, well_grid(), VlpKind::Well);
    const auto& g = t.grid;
    for (std::size_t i = 0; i < g.axis_size(0); ++i)
      for (std::size_t k = 0; k < g.axis_size(2); ++k)
        for (std::size_t j = 1; j < g.axis_size(1); ++j) {
          std::array<std::size_t, 3> a{i, j - 1, k}, b{i, j, k};
          CHECK(t.at(b) >= t.at(a));
        }
  }
}

TEST_CASE("gas lift relieves the well and riser") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto t = synth_vlp(seed, well_grid(), VlpKind::Well);
    const auto& g = t.grid;
    const std::size_t last = g.axis_size(2) - 1;
    for (std::size_t i = 0; i < g.axis_size(0); ++i)
      for (std::size_t j = 0; j < g.axis_size(1); ++j) {
        std::array<std::size_t, 3> lo{i, j, 0}, hi{i, j, last};
        CHECK(t.at(hi) <= t.at(lo));
      }

    Grid mg = make_grid({{0, 500, 1000}, {0, 1, 2}, {50, 90}, {0.1, 0.3, 0.5}});
    auto m = synth_vlp(seed, mg, VlpKind::Manifold, 12.0);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t k = 0; k < 2; ++k)
        for (std::size_t l = 0; l < 3; ++l) {
          std::array<std::size_t, 4> lo{i, 0, k, l}, hi{i, 2, k, l};
          CHECK(m.at(hi) <= m.at(lo));
          CHECK(m.at(lo) > 12.0);
        }
  }
}

TEST_CASE("tables are deterministic per seed") {
  auto a = synth_vlp(99, well_grid(), VlpKind::Well);
  auto b = synth_vlp(99, well_grid(), VlpKind::Well);
  auto c = synth_vlp(100, well_grid(), VlpKind::Well);
  CHECK(a.values == b.values);
  CHECK(a.values != c.values);
  CHECK_THROWS_AS(synth_vlp(1, make_grid({{0, 1}, {0, 1}}), VlpKind::Well), Error);
}

TEST_CASE("scenario catalog shapes") {
  const auto& cat = scenario_catalog();
  REQUIRE(cat.size() == 9);
  CHECK(cat.front().id == "S1");
  CHECK(cat.front().wells == 1);
  CHECK(cat.front().manifolds == 0);
  CHECK(cat.back().id == "S9");
  CHECK(cat.back().wells == 9);
  CHECK(cat.back().manifolds == 2);
  CHECK(find_scenario("S5").wells == 5);
  CHECK_THROWS_AS(find_scenario("S10"), Error);
}

TEST_CASE("binary counts per scenario") {
  const std::array<std::size_t, 9> expected{2, 4, 6, 9, 11, 13, 16, 18, 20};
  const auto& cat = scenario_catalog();
  for (std::size_t i = 0; i < 9; ++i) {
    CAPTURE(cat[i].id);
    CHECK(cat[i].num_binaries() == expected[i]);
    ProblemIR ir = build_opo_instance(cat[i].shape(), 7);
    CHECK(ir.num_binaries() == expected[i]);
  }
}

TEST_CASE("full-scale presets give the expected weight counts") {
  const std::array<std::size_t, 9> xi{50, 100, 150, 255, 305, 355, 460, 510, 560};
  const std::array<std::size_t, 9> lambda{4000, 8000, 12000, 46000, 50000, 54000, 88000, 92000, 96000};
  const auto& cat = scenario_catalog();
  for (std::size_t i = 0; i < 9; ++i) {
    CAPTURE(cat[i].id);
    ProblemSize sz = problem_size(build_opo_instance(cat[i].shape(true), 3));
    CHECK(sz.xi == xi[i]);
    CHECK(sz.lambda == lambda[i]);
    CHECK(sz.binaries == cat[i].num_binaries());
  }
}

TEST_CASE("invalid scenarios are refused") {
  OpoShape none{0, 0, scenario_catalog().front().desk};
  try {
    build_opo_instance(none, 1);
    FAIL("expected InvalidScenario");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidScenario);
  }
  OpoShape orphan{1, 2, scenario_catalog().front().desk};
  CHECK_THROWS_AS(build_opo_instance(orphan, 1), Error);
  OpoShape flat{1, 0, {{1, 3, 3}, {2, 2, 2, 2}}};
  CHECK_THROWS_AS(build_opo_instance(flat, 1), Error);
}

TEST_CASE("sampled parameters respect their invariants") {
  for (const auto& sc : scenario_catalog()) {
    auto p = sample_opo(sc.shape(), 11);
    CHECK(p.platform.liq_max > 0);
    CHECK(p.platform.inj_max > 0);
    for (const auto& w : p.wells) {
      CHECK(w.pi > 0);
      CHECK(w.p_res > p.platform.p_sep);
      CHECK(w.inj_min <= w.inj_max);
      const double top = *std::max_element(w.vlp.values.begin(), w.vlp.values.end());
      CHECK(w.big_m >= top - p.platform.p_sep);
    }
    for (const auto& m : p.manifolds) {
      CHECK(!m.wells.empty());
      const double top = *std::max_element(m.vlp.values.begin(), m.vlp.values.end());
      CHECK(m.big_m >= top - p.platform.p_sep);
    }
  }
}

TEST_CASE("shutting everything in is feasible with zero production") {
  for (const auto& sc : scenario_catalog()) {
    CAPTURE(sc.id);
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      ProblemIR ir = build_opo_instance(sc.shape(), seed);
      auto x = all_closed_point(ir);
      CHECK(linear_violation(ir, x) <= 1e-12);
      CHECK(interpolant_violation(ir, x) <= 1e-12);
      CHECK(ir.user_objective(ir.objective_value(x)) == 0.0);
    }
  }
}

TEST_CASE("single satellite well solves to the same optimum with both engines") {
  const OpoShape shape{1, 0, {{3, 3, 3}, {2, 2, 2, 2}}};
  for (std::uint64_t seed : {5u, 6u}) {
    CAPTURE(seed);
    ProblemIR ir = build_opo_instance(shape, seed);
    auto rfe = solve_rfe(ir);
    auto orc = enumerate_oracle(ir);
    REQUIRE(rfe.status == RfeStatus::Optimal);
    REQUIRE(orc.best.status == NlpStatus::Optimal);
    CHECK(std::abs(rfe.objective - orc.best.objective) <= 1e-6);
    CHECK(ir.user_objective(rfe.objective) > 0.0);
    CHECK(scaled_violation(ir, rfe.x) <= 1e-7);
  }
}

TEST_CASE("closed components carry no flow") {
  const OpoShape shape{2, 1, {{2, 2, 2}, {2, 2, 2, 2}}};
  ProblemIR ir = build_opo_instance(shape, 21);
  auto r = solve_rfe(ir);
  REQUIRE(r.status == RfeStatus::Optimal);
  auto orc = enumerate_oracle(ir);
  REQUIRE(orc.best.status == NlpStatus::Optimal);
  CHECK(std::abs(r.objective - orc.best.objective) <= 1e-6);

  const auto& x = r.x;
  for (std::string w : {"_w0", "_w1"}) {
    if (var(ir, x, "y" + w) > 0.5) continue;
    for (std::string v : {"pus", "qliq", "qoil", "qwater", "qgas", "qinj"}) CHECK(var(ir, x, v + w) == 0.0);
  }
  // manifold mass balance holds on the returned point
  CHECK(var(ir, x, "qoil_m0") ==
        doctest::Approx(var(ir, x, "qoil_w0") + var(ir, x, "qoil_w1")).epsilon(1e-9));
}

#include <doctest.h>

#include <cmath>
#include <random>

#include "mlrfe/error.hpp"
#include "mlrfe/random_instance.hpp"
#include "mlrfe/spatial.hpp"
#include "oracles.hpp"

using namespace mlrfe;

namespace {

// Box problem over unit-cube inputs with one multilinear term.
BoxNlp unit_box(std::size_t dims, std::vector<double> corners) {
  BoxNlp nlp;
  CellTerm t;
  for (std::size_t j = 0; j < dims; ++j) {
    nlp.lo.push_back(0.0);
    nlp.hi.push_back(1.0);
    t.inputs.push_back(static_cast<int>(j));
    t.lo.push_back(0.0);
    t.hi.push_back(1.0);
  }
  const auto [mn, mx] = std::minmax_element(corners.begin(), corners.end());
  nlp.lo.push_back(*mn);
  nlp.hi.push_back(*mx);
  t.output = static_cast<int>(dims);
  t.corners = std::move(corners);
  nlp.terms.push_back(std::move(t));
  return nlp;
}

}  // namespace

TEST_CASE("McCormick envelope on the unit square") {
  auto e = mccormick_envelope(0, 1, 0, 1);
  CHECK(e.under(0.5, 0.5) == doctest::Approx(0.0));
  CHECK(e.over(0.5, 0.5) == doctest::Approx(0.5));
  CHECK(e.under(0.8, 0.9) == doctest::Approx(0.7));
  CHECK(e.over(0.8, 0.9) == doctest::Approx(0.8));
}

TEST_CASE("McCormick envelope collapses for a degenerate interval") {
  auto e = mccormick_envelope(2.0, 2.0, -1.0, 3.0);
  for (double v : {-1.0, 0.0, 1.7, 3.0}) {
    CHECK(e.under(2.0, v) == doctest::Approx(2.0 * v));
    CHECK(e.over(2.0, v) == doctest::Approx(2.0 * v));
  }
}

TEST_CASE("McCormick envelope sandwiches the product") {
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int box = 0; box < 20; ++box) {
    double ul = u(rng), uu = u(rng), vl = u(rng), vu = u(rng);
    if (ul > uu) std::swap(ul, uu);
    if (vl > vu) std::swap(vl, vu);
    auto e = mccormick_envelope(ul, uu, vl, vu);
    for (int s = 0; s < 50; ++s) {
      const double a = ul + (uu - ul) * (u(rng) + 3) / 6;
      const double b = vl + (vu - vl) * (u(rng) + 3) / 6;
      CHECK(e.under(a, b) <= a * b + 1e-12);
      CHECK(e.over(a, b) >= a * b - 1e-12);
    }
  }
}

TEST_CASE("maximum of a product on the simplex") {
  BoxNlp nlp = unit_box(2, {0, 0, 0, 1});
  nlp.objective.terms = {{-1.0, 2}};
  nlp.rows.push_back({"sum", {{1.0, 0}, {1.0, 1}}, RowSense::Le, 1.0});
  auto r = solve_box_global(nlp);
  REQUIRE(r.status == NlpStatus::Optimal);
  CHECK(r.objective == doctest::Approx(-0.25).epsilon(1e-6));
  CHECK(r.x[0] == doctest::Approx(0.5).epsilon(1e-3));
  CHECK(r.x[1] == doctest::Approx(0.5).epsilon(1e-3));
  CHECK(r.objective - r.lower_bound <= 1e-6);
}

TEST_CASE("purely linear subproblem matches the LP solver") {
  std::mt19937 rng(21);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 10; ++trial) {
    BoxNlp nlp;
    LpProblem lp;
    for (int j = 0; j < 4; ++j) {
      nlp.lo.push_back(-1);
      nlp.hi.push_back(2);
      const double c = u(rng);
      nlp.objective.terms.push_back({c, j});
      lp.add_column(-1, 2, c);
    }
    for (int i = 0; i < 3; ++i) {
      LinConstraint row{"r", {}, RowSense::Le, 0.5 + std::abs(u(rng))};
      std::vector<int> idx;
      std::vector<double> val;
      for (int j = 0; j < 4; ++j) {
        const double a = u(rng);
        row.terms.push_back({a, j});
        idx.push_back(j);
        val.push_back(a);
      }
      lp.add_row(idx, val, RowSense::Le, row.rhs);
      nlp.rows.push_back(row);
    }
    auto r = solve_box_global(nlp);
    auto l = solve_lp(lp);
    REQUIRE(r.status == NlpStatus::Optimal);
    CHECK(r.objective == doctest::Approx(l.objective).epsilon(1e-9));
    CHECK(r.nodes == 1);
  }
}

TEST_CASE("trilinear objective against dense grid sampling") {
  std::mt19937 rng(33);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 4; ++trial) {
    std::vector<double> corners(8);
    for (auto& c : corners) c = u(rng);
    BoxNlp nlp = unit_box(3, corners);
    nlp.objective.terms = {{1.0, 3}};
    // a cut through the cube keeps the minimiser off the vertices
    nlp.rows.push_back({"cut", {{1.0, 0}, {1.0, 1}, {1.0, 2}}, RowSense::Le, 1.3});
    nlp.rows.push_back({"cut2", {{1.0, 0}, {-1.0, 1}}, RowSense::Ge, -0.4});

    const int n = 50;
    double best = kInf;
    std::vector<double> arg;
    for (int i = 0; i <= n; ++i)
      for (int j = 0; j <= n; ++j)
        for (int k = 0; k <= n; ++k) {
          std::vector<double> p{double(i) / n, double(j) / n, double(k) / n, 0.0};
          p[3] = multilinear_eval(corners, std::span<const double>(p.data(), 3));
          if (p[0] + p[1] + p[2] > 1.3 || p[0] - p[1] < -0.4) continue;
          if (p[3] < best) {
            best = p[3];
            arg = p;
          }
        }
    auto polished = local_solve(nlp, arg);
    if (polished.feasible) best = std::min(best, polished.objective);

    auto r = solve_box_global(nlp);
    REQUIRE(r.status == NlpStatus::Optimal);
    CHECK(r.objective <= best + 1e-5);
    CHECK(r.objective >= best - 1e-5);
    CHECK(nlp_violation(nlp, r.x) <= 1e-7);
  }
}

TEST_CASE("oracle on a single cell equals the cell solve") {
  ProblemBuilder b;
  int x = b.add_continuous("x", 0, 1);
  int y = b.add_continuous("y", 0, 2);
  int f = b.add_continuous("f", -10, 10);
  b.add_interpolant("g", {x, y}, {{make_table(make_grid({{0, 1}, {0, 2}}), {1, -2, 0.5, 3}), f}});
  b.add_constraint("c", {{1.0, x}, {1.0, y}}, RowSense::Ge, 0.7);
  b.minimize({{1.0, f}, {0.3, x}});
  ProblemIR ir = b.build();
  auto o = enumerate_oracle(ir);
  Fixing only{{{0, 0}}, {}};
  auto direct = solve_box_global(build_subproblem(ir, only));
  REQUIRE(o.best.status == NlpStatus::Optimal);
  CHECK(o.subproblems == 1);
  CHECK(o.best.objective == doctest::Approx(direct.objective).epsilon(1e-12));
}

TEST_CASE("oracle takes the best of all cells and binary values") {
  ProblemBuilder b;
  int x = b.add_continuous("x", 0, 2);
  int y = b.add_continuous("y", 0, 2);
  int f = b.add_continuous("f", -20, 20);
  int z = b.add_binary("z");
  std::vector<double> vals{2, -1, 0.5, 1, 3, -2, 0, 1.5, -0.5};
  b.add_interpolant("g", {x, y}, {{make_table(make_grid({{0, 1, 2}, {0, 1, 2}}), vals), f}});
  b.add_constraint("link", {{1.0, x}, {1.0, y}, {1.0, z}}, RowSense::Le, 2.5);
  b.minimize({{1.0, f}, {-0.4, z}, {0.1, x}});
  ProblemIR ir = b.build();
  auto o = enumerate_oracle(ir);
  CHECK(o.subproblems == 8);

  double best = kInf;
  for (int zb = 0; zb < 2; ++zb)
    for (int s = 0; s < 2; ++s)
      for (int t = 0; t < 2; ++t) {
        Fixing fx{{{s, t}}, {zb}};
        auto r = solve_box_global(build_subproblem(ir, fx));
        if (r.status == NlpStatus::Optimal) best = std::min(best, r.objective);
      }
  REQUIRE(o.best.status == NlpStatus::Optimal);
  CHECK(o.best.objective == doctest::Approx(best).epsilon(1e-12));
  CHECK(linear_violation(ir, o.best.x) <= 1e-7);
  CHECK(interpolant_violation(ir, o.best.x) <= 1e-7);
}

TEST_CASE("oracle reports infeasibility") {
  ProblemBuilder b;
  int x = b.add_continuous("x", 0, 2);
  int f = b.add_continuous("f", -20, 20);
  b.add_interpolant("g", {x}, {{make_table(make_grid({{0, 1, 2}}), {1, 2, 3}), f}});
  b.add_constraint("low", {{1.0, f}}, RowSense::Le, 0.0);
  b.minimize({{1.0, f}});
  auto o = enumerate_oracle(b.build());
  CHECK(o.best.status == NlpStatus::Infeasible);
  CHECK(std::isinf(o.best.objective));
}

TEST_CASE("oracle refuses oversized enumerations") {
  std::vector<double> axis(60);
  for (int i = 0; i < 60; ++i) axis[i] = i;
  ProblemBuilder b;
  int x = b.add_continuous("x", 0, 59);
  int y = b.add_continuous("y", 0, 59);
  int f = b.add_continuous("f", -1e4, 1e4);
  std::vector<std::size_t> m{0, 1};
  b.add_interpolant("g", {x, y}, {{product_table(make_grid({axis, axis}), m), f}});
  b.add_binary("z1");
  b.add_binary("z2");
  b.minimize({{1.0, f}});
  try {
    enumerate_oracle(b.build());
    FAIL("expected EnumerationTooLarge");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EnumerationTooLarge);
  }
}

TEST_CASE("parallel and serial oracles agree") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    ProblemIR ir = random_instance(seed);
    auto p = enumerate_oracle(ir);
    auto s = enumerate_oracle_serial(ir);
    CHECK(p.best.status == s.best.status);
    if (p.best.status == NlpStatus::Optimal) {
      CHECK(p.best.objective == s.best.objective);
      CHECK(p.fixing == s.fixing);
    }
  }
}

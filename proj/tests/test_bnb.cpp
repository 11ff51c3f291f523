#include <doctest.h>

#include <cmath>
#include <random>

#include "mlrfe/bnb.hpp"

using namespace mlrfe;

namespace {

// Minimum over all 0/1 assignments of the LP with binaries fixed.
double enumerate_binaries(LpProblem lp, const std::vector<int>& bins) {
  double best = kInf;
  for (unsigned mask = 0; mask < (1u << bins.size()); ++mask) {
    for (std::size_t b = 0; b < bins.size(); ++b) {
      const double v = (mask >> b) & 1u;
      lp.lo[bins[b]] = v;
      lp.hi[bins[b]] = v;
    }
    auto r = solve_lp(lp);
    if (r.status == LpStatus::Optimal) best = std::min(best, r.objective);
  }
  return best;
}

}  // namespace

TEST_CASE("single binary without rows") {
  LpProblem lp;
  lp.add_column(0, 1, 1.0);
  std::vector<int> bins{0};
  auto r = solve_milp(lp, bins);
  REQUIRE(r.status == MipStatus::Optimal);
  CHECK(r.objective == doctest::Approx(0.0));
}

TEST_CASE("infeasible cover") {
  LpProblem lp;
  lp.add_column(0, 1, 1.0);
  lp.add_column(0, 1, 1.0);
  lp.add_row({0, 1}, {1, 1}, RowSense::Ge, 3.0);
  std::vector<int> bins{0, 1};
  CHECK(solve_milp(lp, bins).status == MipStatus::Infeasible);
}

TEST_CASE("knapsack matches exhaustive enumeration") {
  std::mt19937 rng(12);
  std::uniform_real_distribution<double> u(1, 10);
  for (int trial = 0; trial < 10; ++trial) {
    LpProblem lp;
    std::vector<int> idx;
    std::vector<double> w;
    std::vector<double> value;
    double total = 0;
    for (int i = 0; i < 6; ++i) {
      value.push_back(u(rng));
      w.push_back(u(rng));
      total += w.back();
      lp.add_column(0, 1, -value.back());
      idx.push_back(i);
    }
    const double cap = 0.45 * total;
    lp.add_row(idx, w, RowSense::Le, cap);
    double best = 0;
    for (unsigned mask = 0; mask < 64; ++mask) {
      double wt = 0, val = 0;
      for (int i = 0; i < 6; ++i) {
        if ((mask >> i) & 1u) {
          wt += w[i];
          val += value[i];
        }
      }
      if (wt <= cap) best = std::max(best, val);
    }
    auto r = solve_milp(lp, idx);
    REQUIRE(r.status == MipStatus::Optimal);
    CHECK(-r.objective == doctest::Approx(best).epsilon(1e-9));
    CHECK(r.bound <= r.objective + 1e-9);
    for (int j : idx) CHECK((r.x[j] == 0.0 || r.x[j] == 1.0));
  }
}

TEST_CASE("mixed problems match enumeration of the binaries") {
  std::mt19937 rng(77);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 25; ++trial) {
    CAPTURE(trial);
    LpProblem lp;
    std::vector<int> bins;
    for (int j = 0; j < 4; ++j) lp.add_column(-2, 2, u(rng));
    for (int j = 0; j < 4; ++j) bins.push_back(lp.add_column(0, 1, u(rng)));
    for (int i = 0; i < 5; ++i) {
      std::vector<int> idx;
      std::vector<double> val;
      for (int j = 0; j < 8; ++j) {
        idx.push_back(j);
        val.push_back(u(rng));
      }
      lp.add_row(idx, val, i % 2 ? RowSense::Le : RowSense::Ge, 0.3 * u(rng) + (i % 2 ? 0.5 : -0.5));
    }
    const double oracle = enumerate_binaries(lp, bins);
    auto r = solve_milp(lp, bins);
    if (std::isinf(oracle)) {
      CHECK(r.status == MipStatus::Infeasible);
    } else {
      REQUIRE(r.status == MipStatus::Optimal);
      CHECK(r.objective == doctest::Approx(oracle).epsilon(1e-8));
    }
  }
}

TEST_CASE("adding a valid cut never lowers the optimum") {
  LpProblem lp;
  std::vector<int> bins;
  const double cost[] = {-3, -2, -4, -1};
  for (double c : cost) bins.push_back(lp.add_column(0, 1, c));
  lp.add_row({0, 1, 2, 3}, {2, 1, 3, 1}, RowSense::Le, 4.0);
  auto first = solve_milp(lp, bins);
  REQUIRE(first.status == MipStatus::Optimal);
  // exclude the optimal assignment
  std::vector<int> idx;
  std::vector<double> val;
  double rhs = 1.0;
  for (int j : bins) {
    idx.push_back(j);
    if (first.x[j] > 0.5) {
      val.push_back(-1.0);
      rhs -= 1.0;
    } else {
      val.push_back(1.0);
    }
  }
  lp.add_row(idx, val, RowSense::Ge, rhs);
  auto second = solve_milp(lp, bins);
  REQUIRE(second.status == MipStatus::Optimal);
  CHECK(second.objective >= first.objective - 1e-9);
  bool differs = false;
  for (int j : bins) differs |= std::abs(second.x[j] - first.x[j]) > 0.5;
  CHECK(differs);
}

TEST_CASE("node limit is reported, not thrown") {
  LpProblem lp;
  std::vector<int> idx;
  std::vector<double> w;
  for (int i = 0; i < 12; ++i) {
    idx.push_back(lp.add_column(0, 1, -(1.0 + 0.01 * i)));
    w.push_back(2.0);
  }
  lp.add_row(idx, w, RowSense::Le, 11.0);
  MipOptions opt;
  opt.node_limit = 2;
  auto r = solve_milp(lp, idx, opt);
  CHECK(r.status == MipStatus::NodeLimit);
  CHECK(r.nodes == 2);
}

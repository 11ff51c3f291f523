#include "mlrfe/opo.hpp"

#include <algorithm>
#include <random>

#include "mlrfe/error.hpp"
#include "mlrfe/simplex.hpp"

namespace mlrfe {

namespace {

// Sampling ranges. Reservoir pressure clears the separator by more than the
// largest well plus riser pressure drop, so every well can flow.
constexpr double kSepLo = 10.0, kSepHi = 20.0;
constexpr double kResAboveSepLo = 180.0, kResAboveSepHi = 240.0;
constexpr double kPiLo = 2.0, kPiHi = 6.0;
constexpr double kIglrMax = 2.0;
constexpr double kGorLo = 40.0, kGorHi = 120.0;
constexpr double kWctLo = 0.1, kWctHi = 0.6;
constexpr double kBigMMargin = 1.1;
constexpr std::size_t kWellsPerManifold = 3;

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = lo + (hi - lo) * static_cast<double>(i) / (n - 1);
  v.back() = hi;
  return v;
}

std::pair<double, double> widen(double lo, double hi) {
  if (hi - lo > 1e-6 * std::max(1.0, std::abs(hi))) return {lo, hi};
  const double pad = 0.05 * std::max(std::abs(lo), 1e-3);
  return {lo - pad, hi + pad};
}

void check_shape(const OpoShape& s) {
  if (s.wells == 0) throw Error(ErrorCode::InvalidScenario, "scenario needs at least one well");
  if (s.manifolds > s.wells) {
    throw Error(ErrorCode::InvalidScenario, "every manifold needs at least one well");
  }
  for (std::size_t n : s.grids.well)
    if (n < 2) throw Error(ErrorCode::InvalidScenario, "well grids need two breakpoints per axis");
  if (s.manifolds > 0) {
    for (std::size_t n : s.grids.manifold)
      if (n < 2) {
        throw Error(ErrorCode::InvalidScenario, "manifold grids need two breakpoints per axis");
      }
  }
}

void breakpoint_at(const Grid& g, std::size_t flat, std::vector<double>& p) {
  const auto multi = g.multi_index(flat);
  for (std::size_t j = 0; j < multi.size(); ++j) p[j] = g.axis(j)[multi[j]];
}

double table_max(const LookupTable& t) { return *std::max_element(t.values.begin(), t.values.end()); }

}  // namespace

LookupTable synth_vlp(std::uint64_t seed, const Grid& grid, VlpKind kind, double outlet_pressure) {
  std::mt19937_64 rng(seed);
  auto draw = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  const std::size_t dims = kind == VlpKind::Well ? 3 : 4;
  if (grid.dims() != dims) {
    throw Error(ErrorCode::DimensionMismatch, "vlp grid has the wrong number of axes");
  }
  const std::size_t iglr_axis = kind == VlpKind::Well ? 2 : 1;
  const double q_max = grid.axis(0).back();
  const double i_max = grid.axis(iglr_axis).back();
  auto unit = [&](std::size_t axis, double v) {
    const auto& a = grid.axis(axis);
    return (v - a.front()) / (a.back() - a.front());
  };

  std::vector<double> values(grid.num_points());
  std::vector<double> p(dims);
  if (kind == VlpKind::Well) {
    const double head = draw(60.0, 100.0);
    const double relief = draw(0.3, 0.5);
    const double friction = draw(30.0, 60.0);
    for (std::size_t k = 0; k < values.size(); ++k) {
      breakpoint_at(grid, k, p);
      const double u = std::max(p[2], 0.0) / i_max;
      const double q = std::max(p[0], 0.0) / q_max;
      values[k] = p[1] + head * (1.0 - relief * u * (2.0 - u)) + friction * q * q;
    }
  } else {
    const double head = draw(20.0, 40.0);
    const double relief = draw(0.2, 0.4);
    const double gas_relief = draw(0.1, 0.2);
    const double friction = draw(10.0, 20.0);
    for (std::size_t k = 0; k < values.size(); ++k) {
      breakpoint_at(grid, k, p);
      const double u = std::max(p[1], 0.0) / i_max;
      const double q = std::max(p[0], 0.0) / q_max;
      const double water = 0.7 + 0.6 * unit(3, p[3]);
      const double gas = 1.0 - gas_relief * unit(2, p[2]);
      values[k] = outlet_pressure + head * water * gas * (1.0 - relief * u * (2.0 - u)) +
                  friction * q * q;
    }
  }
  return make_table(grid, std::move(values));
}

const std::vector<Scenario>& scenario_catalog() {
  static const std::vector<Scenario> catalog = [] {
    const GridPreset desk{{4, 3, 3}, {3, 3, 3, 3}};
    const GridPreset full{{10, 20, 20}, {10, 15, 10, 20}};
    const std::array<std::size_t, 9> manifolds{0, 0, 0, 1, 1, 1, 2, 2, 2};
    std::vector<Scenario> out;
    for (std::size_t i = 0; i < 9; ++i) {
      out.push_back({"S" + std::to_string(i + 1), i + 1, manifolds[i], desk, full});
    }
    return out;
  }();
  return catalog;
}

const Scenario& find_scenario(std::string_view id) {
  for (const auto& s : scenario_catalog())
    if (s.id == id) return s;
  throw Error(ErrorCode::InvalidScenario, "unknown scenario " + std::string(id));
}

OpoParameters sample_opo(const OpoShape& shape, std::uint64_t seed) {
  check_shape(shape);
  std::mt19937_64 rng(seed);
  auto draw = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };

  OpoParameters out;
  out.platform.p_sep = draw(kSepLo, kSepHi);
  const double p_sep = out.platform.p_sep;
  const std::size_t attached = std::min(shape.wells, kWellsPerManifold * shape.manifolds);
  out.manifolds.resize(shape.manifolds);

  double liq_total = 0.0, inj_total = 0.0;
  for (std::size_t w = 0; w < shape.wells; ++w) {
    WellSpec s;
    s.pi = draw(kPiLo, kPiHi);
    s.p_res = p_sep + draw(kResAboveSepLo, kResAboveSepHi);
    s.gor = draw(kGorLo, kGorHi);
    s.wct = draw(kWctLo, kWctHi);
    const double q_max = s.pi * (s.p_res - p_sep);
    const double inj_cap = kIglrMax * q_max;
    s.inj_min = draw(0.02, 0.05) * inj_cap;
    s.inj_max = draw(0.3, 0.6) * inj_cap;
    if (w < attached) {
      const int m = static_cast<int>(w % shape.manifolds);
      s.manifold = m;
      out.manifolds[m].wells.push_back(static_cast<int>(w));
    }
    const auto& n = shape.grids.well;
    Grid g = make_grid({linspace(0.0, q_max, n[0]), linspace(p_sep, s.p_res, n[1]),
                        linspace(0.0, kIglrMax, n[2])});
    s.vlp = synth_vlp(rng(), g, VlpKind::Well);
    s.big_m = kBigMMargin * table_max(s.vlp);
    liq_total += q_max;
    inj_total += s.inj_max;
    out.wells.push_back(std::move(s));
  }

  for (auto& m : out.manifolds) {
    double q_max = 0.0;
    double g_lo = kInf, g_hi = -kInf, w_lo = kInf, w_hi = -kInf;
    for (int w : m.wells) {
      const auto& s = out.wells[w];
      q_max += s.pi * (s.p_res - p_sep);
      g_lo = std::min(g_lo, s.gor);
      g_hi = std::max(g_hi, s.gor);
      w_lo = std::min(w_lo, s.wct);
      w_hi = std::max(w_hi, s.wct);
    }
    std::tie(g_lo, g_hi) = widen(g_lo, g_hi);
    std::tie(w_lo, w_hi) = widen(w_lo, w_hi);
    const auto& n = shape.grids.manifold;
    Grid g = make_grid({linspace(0.0, q_max, n[0]), linspace(0.0, kIglrMax, n[1]),
                        linspace(g_lo, g_hi, n[2]), linspace(w_lo, w_hi, n[3])});
    m.vlp = synth_vlp(rng(), g, VlpKind::Manifold, p_sep);
    m.big_m = kBigMMargin * table_max(m.vlp);
  }

  out.platform.liq_max = draw(0.5, 0.8) * liq_total;
  out.platform.inj_max = draw(0.4, 0.7) * inj_total;
  return out;
}

ProblemIR build_opo_instance(const OpoParameters& prm) {
  if (prm.wells.empty()) throw Error(ErrorCode::InvalidScenario, "scenario needs at least one well");
  const double p_sep = prm.platform.p_sep;
  ProblemBuilder b;

  struct ManifoldVars {
    int y, qliq, iglr, gor, wct, pus, qoil, qwater, qgas, qinj;
  };
  std::vector<ManifoldVars> mv;
  for (std::size_t m = 0; m < prm.manifolds.size(); ++m) {
    const auto& s = prm.manifolds[m];
    if (s.wells.empty()) throw Error(ErrorCode::InvalidScenario, "manifold without wells");
    const auto sfx = "_m" + std::to_string(m);
    const Grid& g = s.vlp.grid;
    ManifoldVars v{};
    v.y = b.add_binary("y" + sfx);
    v.qliq = b.add_continuous("qliq" + sfx, 0.0, g.axis(0).back());
    v.iglr = b.add_continuous("iglr" + sfx, 0.0, g.axis(1).back());
    v.gor = b.add_continuous("gor" + sfx, std::min(0.0, g.axis(2).front()), g.axis(2).back());
    v.wct = b.add_continuous("wct" + sfx, std::min(0.0, g.axis(3).front()), g.axis(3).back());
    v.pus = b.add_continuous("pus" + sfx, 0.0, table_max(s.vlp));
    const double q = g.axis(0).back();
    v.qoil = b.add_continuous("qoil" + sfx, 0.0, q);
    v.qwater = b.add_continuous("qwater" + sfx, 0.0, q);
    v.qgas = b.add_continuous("qgas" + sfx, 0.0, q * g.axis(2).back());
    v.qinj = b.add_continuous("qinj" + sfx, 0.0, q * g.axis(1).back());

    const std::array<std::size_t, 2> water{0, 3}, inj{0, 1};
    std::vector<double> gas(g.num_points());
    std::vector<double> p(4);
    for (std::size_t k = 0; k < gas.size(); ++k) {
      breakpoint_at(g, k, p);
      gas[k] = p[2] * p[0] * (1.0 - p[3]);
    }
    b.add_interpolant("vlp" + sfx, {v.qliq, v.iglr, v.gor, v.wct},
                      {{s.vlp, v.pus},
                       {product_table(g, water), v.qwater},
                       {product_table(g, inj), v.qinj},
                       {make_table(g, std::move(gas)), v.qgas}},
                      v.y);
    b.add_constraint("oil" + sfx, {{1.0, v.qoil}, {-1.0, v.qliq}, {1.0, v.qwater}}, RowSense::Eq, 0.0);
    // riser outlet sits at separator pressure
    b.add_constraint("vlp_on" + sfx, {{1.0, v.pus}, {-s.big_m, v.y}}, RowSense::Ge, p_sep - s.big_m);
    mv.push_back(v);
  }

  std::vector<LinTerm> oil_total, liq_total, inj_total;
  std::vector<std::vector<LinTerm>> mix_oil(mv.size()), mix_water(mv.size()), mix_gas(mv.size()),
      mix_inj(mv.size()), any_open(mv.size());

  for (std::size_t w = 0; w < prm.wells.size(); ++w) {
    const auto& s = prm.wells[w];
    if (!(s.pi > 0.0) || !(s.p_res > p_sep) || s.inj_min > s.inj_max) {
      throw Error(ErrorCode::InvalidScenario, "well " + std::to_string(w) + " has invalid data");
    }
    const auto sfx = "_w" + std::to_string(w);
    const Grid& g = s.vlp.grid;
    const int y = b.add_binary("y" + sfx);
    const int tgl = b.add_binary("tgl" + sfx);
    const int qliq = b.add_continuous("qliq" + sfx, 0.0, g.axis(0).back());
    const int pds = b.add_continuous("pds" + sfx, 0.0, g.axis(1).back());
    const int iglr = b.add_continuous("iglr" + sfx, 0.0, g.axis(2).back());
    const int pus = b.add_continuous("pus" + sfx, 0.0, table_max(s.vlp));
    const double q = g.axis(0).back();
    const int qinj = b.add_continuous("qinj" + sfx, 0.0, q * g.axis(2).back());
    const int qoil = b.add_continuous("qoil" + sfx, 0.0, q);
    const int qwater = b.add_continuous("qwater" + sfx, 0.0, q);
    const int qgas = b.add_continuous("qgas" + sfx, 0.0, q * s.gor);
    const int dp = b.add_continuous("dp" + sfx, -s.big_m, g.axis(1).back());

    const std::array<std::size_t, 2> inj{0, 2};
    b.add_interpolant("vlp" + sfx, {qliq, pds, iglr}, {{s.vlp, pus}, {product_table(g, inj), qinj}}, y);

    b.add_constraint("wct" + sfx, {{1.0, qwater}, {-s.wct, qliq}}, RowSense::Eq, 0.0);
    b.add_constraint("oil" + sfx, {{1.0, qoil}, {-1.0, qliq}, {1.0, qwater}}, RowSense::Eq, 0.0);
    b.add_constraint("gor" + sfx, {{1.0, qgas}, {-s.gor, qoil}}, RowSense::Eq, 0.0);
    b.add_constraint("ipr" + sfx, {{1.0, qliq}, {s.pi, pus}, {-s.pi * s.p_res, y}}, RowSense::Eq, 0.0);
    if (s.manifold) {
      const auto& m = mv.at(static_cast<std::size_t>(*s.manifold));
      b.add_constraint("choke" + sfx, {{1.0, dp}, {-1.0, pds}, {1.0, m.pus}}, RowSense::Eq, 0.0);
      b.add_constraint("attach" + sfx, {{1.0, y}, {-1.0, m.y}}, RowSense::Le, 0.0);
      const auto k = static_cast<std::size_t>(*s.manifold);
      mix_oil[k].push_back({-1.0, qoil});
      mix_water[k].push_back({-1.0, qwater});
      mix_gas[k].push_back({-1.0, qgas});
      mix_inj[k].push_back({-1.0, qinj});
      any_open[k].push_back({-1.0, y});
    } else {
      b.add_constraint("choke" + sfx, {{1.0, dp}, {-1.0, pds}}, RowSense::Eq, -p_sep);
    }
    b.add_constraint("choke_on" + sfx, {{1.0, dp}, {-s.big_m, y}}, RowSense::Ge, -s.big_m);
    b.add_constraint("vlp_on" + sfx, {{1.0, pus}, {-1.0, pds}, {-s.big_m, y}}, RowSense::Ge, -s.big_m);
    b.add_constraint("gl_min" + sfx, {{1.0, qinj}, {-s.inj_min, tgl}}, RowSense::Ge, 0.0);
    b.add_constraint("gl_max" + sfx, {{1.0, qinj}, {-s.inj_max, tgl}}, RowSense::Le, 0.0);
    oil_total.push_back({1.0, qoil});
    liq_total.push_back({1.0, qliq});
    inj_total.push_back({1.0, qinj});
  }

  for (std::size_t m = 0; m < mv.size(); ++m) {
    const auto sfx = "_m" + std::to_string(m);
    auto with = [](std::vector<LinTerm> t, int var) {
      t.push_back({1.0, var});
      return t;
    };
    b.add_constraint("mix_oil" + sfx, with(mix_oil[m], mv[m].qoil), RowSense::Eq, 0.0);
    b.add_constraint("mix_water" + sfx, with(mix_water[m], mv[m].qwater), RowSense::Eq, 0.0);
    b.add_constraint("mix_gas" + sfx, with(mix_gas[m], mv[m].qgas), RowSense::Eq, 0.0);
    b.add_constraint("mix_inj" + sfx, with(mix_inj[m], mv[m].qinj), RowSense::Eq, 0.0);
    b.add_constraint("any_open" + sfx, with(any_open[m], mv[m].y), RowSense::Le, 0.0);
  }
  b.add_constraint("liq_cap", liq_total, RowSense::Le, prm.platform.liq_max);
  b.add_constraint("inj_cap", inj_total, RowSense::Le, prm.platform.inj_max);
  b.maximize(oil_total);
  return b.build();
}

ProblemIR build_opo_instance(const OpoShape& shape, std::uint64_t seed) {
  return build_opo_instance(sample_opo(shape, seed));
}

std::vector<double> all_closed_point(const ProblemIR& ir) {
  std::vector<double> x(ir.variables.size(), 0.0);
  // With everything else at zero, each choke row fixes its pressure drop.
  for (const auto& row : ir.constraints) {
    if (!row.name.starts_with("choke_w") && !row.name.starts_with("choke_m")) continue;
    for (const auto& t : row.terms)
      if (ir.variables[t.var].name.starts_with("dp")) x[t.var] = row.rhs / t.coef;
  }
  return x;
}

}  // namespace mlrfe

#pragma once

// Offshore oil production instances: wells and subsea manifolds whose
// pressure drops are given by synthetic vertical-lift look-up tables.
//
// Units: pressures in bar, flow rates in m3/d, ratios dimensionless.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mlrfe/gridtab.hpp"
#include "mlrfe/model.hpp"

namespace mlrfe {

enum class VlpKind {
  Well,      // axes (q_liq, p_ds, iglr)
  Manifold,  // axes (q_liq, iglr, gor, wct); outlet fixed at separator pressure
};

/// Upstream pressure table: downstream pressure, plus a hydrostatic term
/// that gas relieves, plus friction quadratic in liquid rate. Coefficients
/// are drawn from `seed`. Manifold tables have no p_ds axis and add
/// `outlet_pressure` instead.
LookupTable synth_vlp(std::uint64_t seed, const Grid& grid, VlpKind kind,
                      double outlet_pressure = 0.0);

struct WellSpec {
  double pi = 0.0;     // productivity index, m3/d per bar
  double p_res = 0.0;  // reservoir pressure
  double inj_min = 0.0;
  double inj_max = 0.0;
  double gor = 0.0;
  double wct = 0.0;
  double big_m = 0.0;
  std::optional<int> manifold;  // satellite when empty
  LookupTable vlp;
};

struct ManifoldSpec {
  std::vector<int> wells;
  double big_m = 0.0;
  LookupTable vlp;
};

struct PlatformSpec {
  double p_sep = 0.0;
  double liq_max = 0.0;
  double inj_max = 0.0;
};

struct OpoParameters {
  PlatformSpec platform;
  std::vector<WellSpec> wells;
  std::vector<ManifoldSpec> manifolds;
};

/// Breakpoints per axis, in the axis order of VlpKind.
struct GridPreset {
  std::array<std::size_t, 3> well{};
  std::array<std::size_t, 4> manifold{};
};

struct OpoShape {
  std::size_t wells = 1;
  std::size_t manifolds = 0;
  GridPreset grids;
};

struct Scenario {
  std::string id;
  std::size_t wells = 0;
  std::size_t manifolds = 0;
  GridPreset desk;
  GridPreset full;

  OpoShape shape(bool full_scale = false) const {
    return {wells, manifolds, full_scale ? full : desk};
  }
  /// One on/off binary per component plus one gas-lift switch per well.
  std::size_t num_binaries() const { return wells + manifolds + wells; }
};

/// S1..S9: wells 1..9, manifolds 0,0,0,1,1,1,2,2,2.
const std::vector<Scenario>& scenario_catalog();
const Scenario& find_scenario(std::string_view id);

/// Samples well, manifold and platform data. Up to three wells attach to each
/// manifold, round robin; the rest are satellites. Throws InvalidScenario.
OpoParameters sample_opo(const OpoShape& shape, std::uint64_t seed);

/// Maximises total oil rate. Throws InvalidScenario.
ProblemIR build_opo_instance(const OpoParameters& params);
ProblemIR build_opo_instance(const OpoShape& shape, std::uint64_t seed);

/// Every component shut in: all flows, pressures and binaries zero, chokes
/// absorbing the separator or manifold pressure.
std::vector<double> all_closed_point(const ProblemIR& ir);

}  // namespace mlrfe

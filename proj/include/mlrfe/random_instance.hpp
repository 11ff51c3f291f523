#pragma once

// Small seeded random problems for cross-checking solvers.

#include <cstdint>

#include "mlrfe/model.hpp"

namespace mlrfe {

struct RandomInstanceOptions {
  int max_inputs = 3;       // total interpolant input variables
  int max_breakpoints = 4;  // per axis
  int max_binaries = 2;
  /// Probability of appending a row no point can satisfy.
  double infeasible_rate = 0.1;
};

/// One or two interpolants over at most max_inputs inputs, up to two random
/// linear rows built around a feasible reference point, a random linear
/// objective, and binaries that either switch an interpolant or enter rows
/// and objective. Deterministic per seed.
ProblemIR random_instance(std::uint64_t seed, const RandomInstanceOptions& options = {});

}  // namespace mlrfe

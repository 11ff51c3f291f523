#pragma once

// Versioned JSON instance files: tables with an explicit value ordering,
// variables, rows, interpolant bindings, objective, optional scenario
// metadata and the generator seed.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "mlrfe/model.hpp"
#include "mlrfe/opo.hpp"

namespace mlrfe {

inline constexpr int kInstanceVersion = 1;
/// The only value ordering files may declare.
inline constexpr std::string_view kTableOrdering = "lexicographic-last-fastest";

struct ScenarioMeta {
  std::string id;  // catalog id, or "custom"
  OpoShape shape;
};

struct Instance {
  ProblemIR problem;
  std::optional<ScenarioMeta> scenario;
  std::uint64_t seed = 0;
};

/// Canonical text: fixed key order, shortest round-trip doubles, one table
/// entry per interpolant output in declaration order.
std::string serialize_instance(const Instance& instance);

/// Throws ParseError for malformed documents, unknown versions or orderings,
/// and for problems that fail validation.
Instance parse_instance(std::string_view text);

void write_instance(const std::filesystem::path& path, const Instance& instance);
Instance read_instance(const std::filesystem::path& path);

/// Samples the OPO instance for a shape and seed and records both.
Instance generate_opo(const ScenarioMeta& scenario, std::uint64_t seed);

}  // namespace mlrfe

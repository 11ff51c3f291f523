#pragma once

// Text export of the MILP relaxation for external solvers.

#include <ostream>
#include <string>
#include <string_view>

#include "mlrfe/relax.hpp"

namespace mlrfe {

enum class ExportFormat {
  FixedMps,  // 8-character generated names, 12-character numeric fields
  FreeMps,   // model names, full precision
  Lp,        // CPLEX-style LP text
};

/// Accepts "mps", "free-mps" and "lp". Throws UnsupportedFormat.
ExportFormat parse_export_format(std::string_view tag);
const char* to_string(ExportFormat format);

/// Writes every column and row of the model, cuts included, with binaries
/// marked as integer columns bounded by [0, 1].
void write_milp(std::ostream& out, const MilpModel& milp, ExportFormat format,
                std::string_view name = "mlrfe");
std::string export_milp(const MilpModel& milp, ExportFormat format, std::string_view name = "mlrfe");

}  // namespace mlrfe

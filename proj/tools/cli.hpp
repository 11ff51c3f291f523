#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace mlrfe {

/// Runs the command line given without the program name. Reports go to
/// `out` unless an output path is given, diagnostics to `err`. Returns the
/// process exit code (see ExitCode).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mlrfe

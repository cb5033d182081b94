#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace scenopt {

/// Process exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,
  kExitAssumption = 3,
  kExitSolver = 4,
};

/// Environment variable naming the default output directory.
inline constexpr const char* kOutDirEnv = "SCENOPT_OUT_DIR";

/// Runs the tool on `args` (without the program name).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Parses "start:step:end" into an inclusive grid.
std::vector<double> parse_grid(const std::string& spec);

}  // namespace scenopt

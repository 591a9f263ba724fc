#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qgraph::cli {

enum ExitCode : int {
  kOk = 0,
  kInputError = 2,
  kNumericFailure = 3,
  kPreconditionViolation = 4,
};

/// Runs one command. `args` excludes the program name. Results go to `out`
/// (or the --out file), diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Fixed six-decimal formatting without negative zero.
std::string format_fixed(double value);

}  // namespace qgraph::cli

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tda::cli {

// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kInputError = 2,
  kEmptyData = 3,
  kCheckFailed = 4,
};

// Runs the command line `tda <args...>` (args excludes the program name),
// writing reports to `out` and diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tda::cli

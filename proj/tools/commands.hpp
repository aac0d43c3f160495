#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace tvmax::cli {

enum ExitCode : int {
  kOk = 0,
  kCheckFailed = 1,
  kMalformedInput = 2,
  kInvalidUsage = 3,
  kNumericalFailure = 4,
};

// Entry point shared by the executable and the tests. `args` excludes the
// program name. Errors are reported as a single "error: <kind>: <reason>" line on `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tvmax::cli

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mapind::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,  // bad arguments, unreadable or malformed documents
  kInvalidNetwork = 2,
  kInfeasible = 3,  // zero-probability evidence
  kCapacity = 4,
};

// Entry point behind the `mapind` executable. args excludes the program
// name. Diagnostics go to `err`; `map` and `validate` print to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Maps an in-flight exception to its exit code and writes the message.
int report_exception(std::ostream& err);

}  // namespace mapind::cli

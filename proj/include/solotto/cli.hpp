#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace solotto {

/// Runs the command line `args` (without the program name). Returns the
/// process exit code: 0 success, 2 invalid input, 3 numerical failure.
/// Failures print one line "error[<kind>]: <message>" to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace solotto

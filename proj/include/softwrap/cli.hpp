#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace softwrap {

// Runs one CLI invocation (argv without the program name).
// Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.
// Errors print one machine-parsable line to err.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace softwrap

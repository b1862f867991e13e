#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace hoterm {

/// Exit codes of the command line tool.
enum ExitCode { ExitYes = 0, ExitMaybe = 1, ExitError = 2 };

/// The command line tool without the process around it. `args` excludes the program name.
/// Reports go to `out`, error messages to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hoterm

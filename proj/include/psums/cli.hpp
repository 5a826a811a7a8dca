#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace psums::cli {

// Exit codes shared by every subcommand.
enum exit_code : int { ok = 0, failed = 1, usage = 2 };

// Runs the command line `args` (args[0] is the program name). Normal output
// goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace psums::cli

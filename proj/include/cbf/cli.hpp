#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cbf {

/// Exit statuses of the command-line tool.
enum ExitStatus : int { kExitPass = 0, kExitFailed = 1, kExitConfig = 2 };

/// Entry point of the `cbf` tool; args[0] is the program name.
/// Diagnostics go to `err`, one per line, prefixed "cbf:error:<kind>:" or "cbf:fail:<check>:".
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cbf

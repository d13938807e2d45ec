#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace outpost::cli {

enum ExitCode : int { kOk = 0, kCheckFailed = 1, kUsage = 2, kModuleError = 3 };

// Runs one command line (args excludes the program name). Diagnostics go to `err`,
// summaries to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace outpost::cli

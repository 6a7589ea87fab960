#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace moran::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kTookTooLong = 3 };

/// Runs the command line `args` (without the program name). The JSON report
/// or CSV goes to `out`, diagnostics and the human-readable summary to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace moran::cli

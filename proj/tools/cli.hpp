#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace swibal::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kNumerical = 2 };

/// Runs one command line (without the program name). Human-readable output
/// goes to `out`, diagnostics to `err`; files land in the --out directory.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace swibal::cli

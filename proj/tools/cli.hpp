#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace phdelay::cli {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
  kSuccess = 0,
  kRefuted = 1,
  kInconclusive = 2,
  kUsageError = 3,
};

/// Runs the command line `args` (without the program name). The JSON run
/// report goes to `out`, diagnostics to `err`. Returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Lowercase hex SHA-256 of `data`.
std::string sha256_hex(const std::string& data);

}  // namespace phdelay::cli

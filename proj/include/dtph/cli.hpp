#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "dtph/matcore.hpp"

namespace dtph::cli {

/// Exit statuses of the command-line tool.
enum ExitCode : int { kSuccess = 0, kAssertionFailed = 1, kUsageError = 2, kNumericalFailure = 3 };

/// Runs the tool on argv-style arguments (args[0] is the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "2", "-0.5", "1+2j", "1.5-0.25i", "3j".
Scalar parse_complex(const std::string& text);

}  // namespace dtph::cli

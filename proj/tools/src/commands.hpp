#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace emeasure::cli {

enum ExitCode : int { kPass = 0, kViolation = 1, kInputError = 2 };

/// Runs one command line (without the program name) and returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace emeasure::cli

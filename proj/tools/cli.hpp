#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace streamlsh::cli {

/// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kValidation = 1;
inline constexpr int kIo = 2;
inline constexpr int kInternal = 3;

/// Runs the command line `args` (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace streamlsh::cli

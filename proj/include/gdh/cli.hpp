#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "gdh/io.hpp"

namespace gdh {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitInput = 2,
  kExitNoConvergence = 3,
  kExitResource = 4,
};

/// FNV-1a (64-bit) of the canonical dump of `inputs`, as 16 hex digits.
std::string inputs_digest(const Json& inputs);

/// Runs the command line (without the program name); the report goes to `out`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gdh

#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace convforge::cli {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int {
  kSuccess = 0,
  kValidationError = 2,
  kNumericalFailure = 3,
};

/// Run one command line (args excludes the program name). Results go to
/// `out`; failures are reported on `err` as a single JSON object.
int dispatch(std::span<const std::string> args, std::ostream& out, std::ostream& err);

/// Hex SHA-256 of a file's bytes.
std::string file_digest(const std::string& path);

}  // namespace convforge::cli

#pragma once

#include <iosfwd>

namespace netshift::cli {

enum ExitCode : int { kSuccess = 0, kUsage = 2, kData = 3, kInternal = 4 };

/// Parses the arguments, runs one command and maps failures to exit codes.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace netshift::cli

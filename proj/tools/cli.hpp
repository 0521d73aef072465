#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cirest::cli {

inline constexpr const char* kToolVersion = "0.1.0";

/// Runs the command line `args` (without the program name). Results go to
/// `out`, diagnostics to `err`. Returns 0 on success, 1 on a runtime error
/// and 2 on a usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cirest::cli

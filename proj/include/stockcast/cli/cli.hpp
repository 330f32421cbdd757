#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace stockcast::cli {

inline constexpr const char* kOutputDirEnv = "STOCKCAST_OUTPUT_DIR";

/// Runs one command. `args` excludes the program name. Returns 0 on success,
/// 1 on a configuration or runtime error, 2 on a usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace stockcast::cli

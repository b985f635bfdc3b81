#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace arabiq::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kLintErrors = 1;
inline constexpr int kUsage = 2;
inline constexpr int kProviderFailure = 3;

/// args excludes the program name. Never throws; messages go to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace arabiq::cli

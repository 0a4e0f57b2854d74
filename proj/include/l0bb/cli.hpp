#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace l0bb::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitLimit = 1;
inline constexpr int kExitInput = 2;

/// Entry point shared by the executable and the tests. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace l0bb::cli

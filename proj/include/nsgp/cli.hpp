#pragma once

#include <string>
#include <vector>

namespace nsgp::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitParse = 2;
inline constexpr int kExitNumerical = 3;

// Entry point behind the `nsgp` executable; args excludes the program name.
int run(const std::vector<std::string>& args);

}  // namespace nsgp::cli

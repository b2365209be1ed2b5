#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace tbo::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

// Environment variable naming the default output root ("tbo-out" when unset).
inline constexpr const char* kOutputRootEnv = "TBO_OUTPUT_ROOT";

// Entry point shared by the binary and the tests. args excludes argv[0].
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tbo::cli

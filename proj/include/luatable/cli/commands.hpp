#pragma once

#include <iosfwd>

namespace luatable::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 1;
inline constexpr int kExitUsage = 2;

/// Entry point of the `luatable` tool: `run`, `replay` and `compare`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace luatable::cli

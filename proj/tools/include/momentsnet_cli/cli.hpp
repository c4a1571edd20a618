#pragma once

#include <iosfwd>

namespace momentsnet::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitSelfcheck = 4;

/// Entry point of the momentsnet command; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace momentsnet::cli

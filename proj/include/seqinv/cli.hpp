#pragma once

#include <iosfwd>
#include <string>

namespace seqinv {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitConfigError = 2;

std::string version_string();

/// Entry point of the command-line tool; output goes to the given streams.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace seqinv

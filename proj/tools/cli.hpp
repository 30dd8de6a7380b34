#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tracecause::cli {

inline constexpr int kExitCause = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitNoCause = 3;

// Runs one command line (without the program name). Human output goes to
// `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tracecause::cli

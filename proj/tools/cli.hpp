#pragma once

#include <ostream>

namespace spindecay::cli {

// Exit statuses.
inline constexpr int kOk = 0;
inline constexpr int kFailure = 1;  // `check` found a failing criterion
inline constexpr int kInputError = 2;
inline constexpr int kRegimeError = 3;
inline constexpr int kNumericError = 4;

// Runs the command line; reports go to `out`, diagnostics to `err`.
int Run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace spindecay::cli

#pragma once

#include "meancurve/error.hpp"

namespace meancurve::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitNumeric = 4;

int exit_code(ErrorCode code);

/// Entry point of the meancurve command; returns the process exit status.
int run(int argc, const char* const* argv);

}  // namespace meancurve::cli

/**
 * @file cli.hpp
 * @brief Command-line front end: simulate, optimize, campaign and validate.
 */
#pragma once

#include <iosfwd>

namespace fourierctl {

inline constexpr int kExitSuccess = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitRuntimeFailure = 2;

/// Runs one command line (argv[0] is the program name) and returns the exit
/// code. Reports go to `out`, errors and violations to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fourierctl

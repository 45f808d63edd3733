#pragma once

// Entry point of the `dladmc` command-line tool, kept in a library so tests
// can drive it without spawning processes.
//
// Exit codes: 0 success, 1 invalid input or usage error, 2 numerical failure.

#include <iosfwd>
#include <span>
#include <string>

namespace dladmc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitNumerical = 2;

/// `args` excludes the program name.
int dispatch(std::span<const std::string> args, std::ostream& out, std::ostream& err);

/// Default worker count: $DLADMC_THREADS when set to a positive integer,
/// otherwise 1.
unsigned default_threads();

}  // namespace dladmc::cli

#pragma once

#include <iosfwd>

namespace worm {

inline constexpr int kExitPass = 0;
inline constexpr int kExitCertificationFailure = 1;
inline constexpr int kExitConfigError = 2;

/// Entry point of the wormcert tool. Returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace worm

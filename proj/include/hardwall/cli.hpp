#pragma once

#include <cstdint>

namespace hardwall {

// Seed used by stochastic commands when --seed is not given.
inline constexpr std::uint64_t kDefaultSeed = 271828;

// Entry point for the hardwall binary, also callable in-process (tests and
// the determinism criterion drive it this way).  Returns the process exit
// code: 0 success, 1 bad arguments, 2 numerical failure, 3 acceptance
// failure.
int cli_run(int argc, const char* const* argv);

}  // namespace hardwall

#pragma once

#include <iosfwd>

namespace amvs {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitParse = 3;
inline constexpr int kExitNumerical = 4;

// Entry point of the `amvs` tool: synth, reconstruct, fuse, eval, ablate.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace amvs

#pragma once

#include <cstdint>
#include <random>

namespace dsgt {

// splitmix64 finalizer; good avalanche for seed derivation.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Deterministic substream keyed by (master, a, b, c). Streams for distinct
/// keys are independent, so per-agent/per-iteration draws do not depend on
/// scheduling order.
inline std::mt19937_64 substream(std::uint64_t master, std::uint64_t a,
                                 std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t s = mix64(master);
  s = mix64(s ^ mix64(a));
  s = mix64(s ^ mix64(b + 0x517cc1b727220a95ULL));
  s = mix64(s ^ mix64(c + 0x2545f4914f6cdd1dULL));
  return std::mt19937_64(s);
}

}  // namespace dsgt

#pragma once

#include <cstdint>
#include <random>

namespace qmcpde {

// splitmix64 finalizer; full avalanche on 64 bits.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Independent substream derived from (master seed, stream index).
/// Every sample or shift owns its stream, so parallel evaluation order
/// cannot change the numbers drawn.
inline std::mt19937_64 stream_rng(std::uint64_t master, std::uint64_t stream) {
  return std::mt19937_64(mix64(mix64(master) ^ stream));
}

// Uniform in [0,1) with 53 random bits; avoids the implementation-defined
// behaviour of std::uniform_real_distribution.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace qmcpde

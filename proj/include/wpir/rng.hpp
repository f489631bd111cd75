#pragma once

#include <cstdint>

#include "wpir/core.hpp"

namespace wpir {

// Used whenever a command is run without --seed.
inline constexpr std::uint64_t kDefaultSeed = 20210627;

inline constexpr const char* kRngName = "mt19937_64/splitmix64";

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Independent generator for substream `stream` of `seed`.
inline Rng make_stream(std::uint64_t seed, std::uint64_t stream) {
  return Rng(splitmix64(splitmix64(seed) ^ splitmix64(~stream)));
}

}  // namespace wpir

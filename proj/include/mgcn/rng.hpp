#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace mgcn {

// All randomness in the project flows from a single seed through named
// sub-streams, so runs are reproducible component by component.

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Deterministic generator for the sub-stream (seed, name, index).
inline std::mt19937_64 substream(std::uint64_t seed, std::string_view name,
                                 std::uint64_t index = 0) {
  return std::mt19937_64(
      splitmix64(splitmix64(seed ^ fnv1a(name)) + index));
}

}  // namespace mgcn

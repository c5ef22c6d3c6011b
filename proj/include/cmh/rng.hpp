#pragma once

#include <cstdint>
#include <initializer_list>

namespace cmh {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Stable stream key from a base seed and any number of salts, used so every
/// (seed, target, run) combination draws from an independent generator.
inline std::uint64_t seed_sequence(std::uint64_t seed, std::initializer_list<std::uint64_t> salts) {
  std::uint64_t h = splitmix64(seed);
  for (auto s : salts) h = splitmix64(h ^ splitmix64(s));
  return h;
}

inline std::uint64_t seed_sequence(std::uint64_t seed, std::uint64_t salt) {
  return seed_sequence(seed, {salt});
}

}  // namespace cmh

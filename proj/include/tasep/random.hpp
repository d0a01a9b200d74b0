#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace tasep {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// FNV-1a; stable across platforms, used to turn experiment names into stream tags.
inline std::uint64_t tag(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Seed for replicate `rep` of experiment `experiment` under top-level `seed`.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t experiment, std::uint64_t rep = 0) {
  return splitmix64(splitmix64(splitmix64(seed) ^ experiment) + rep);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view experiment, std::uint64_t rep = 0) {
  return derive_seed(seed, tag(experiment), rep);
}

inline Rng make_rng(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  return Rng(seq);
}

inline double uniform01(Rng& rng) {
  // 53-bit mantissa in [0, 1)
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline bool bernoulli(Rng& rng, double p) { return uniform01(rng) < p; }

}  // namespace tasep

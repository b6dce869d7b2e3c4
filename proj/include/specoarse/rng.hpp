#pragma once

#include <cstdint>
#include <random>

namespace specoarse {

enum class Stage : std::uint64_t {
  kMedioidInit = 1,
  kFineEigen = 2,
  kCoarseEigen = 3,
};

/// splitmix64 finalizer; used to derive independent per-stage seeds.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed for (stage, level) derived from the run seed by counter-based
/// splitting, so each stage can be replayed in isolation.
constexpr std::uint64_t stage_seed(std::uint64_t seed, Stage stage, std::uint64_t level = 0) {
  return mix64(mix64(seed) ^ mix64(static_cast<std::uint64_t>(stage) + (level << 8)));
}

/// Platform-stable uniform integer in [0, bound) using rejection on the raw
/// engine output (std::uniform_int_distribution is implementation-defined).
inline std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

/// Platform-stable uniform real in [-1, 1).
inline double uniform_symmetric(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-52 - 1.0;
}

}  // namespace specoarse

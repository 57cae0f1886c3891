#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace rankforge::util {

// 64-bit FNV-1a. Stable across platforms; used for cache keys and seed derivation.
std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 0xcbf29ce484222325ULL);

std::uint64_t splitmix64(std::uint64_t x);

// Mixes a base seed with a string into an independent stream seed.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view salt);

std::string hex64(std::uint64_t value);

// Unbiased integer in [0, bound) from a 64-bit generator (bound >= 1).
template <typename Rng>
std::uint64_t bounded(Rng& rng, std::uint64_t bound) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

// Uniform double in [0, 1) using the top 53 bits.
template <typename Rng>
double unit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace rankforge::util

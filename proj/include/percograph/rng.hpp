#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace percograph {

// Stateless, counter-based randomness. Every random decision in the library is
// keyed by (seed, counter) so results do not depend on iteration order or on
// how work is split across threads.

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Combines a sequence of words into one well-mixed 64-bit key.
constexpr std::uint64_t mix_seed(std::initializer_list<std::uint64_t> words) noexcept {
  std::uint64_t h = 0x6a09e667f3bcc909ULL;
  for (std::uint64_t w : words) h = splitmix64(h ^ splitmix64(w));
  return h;
}

/// Uniform double in [0, 1) with 53 random bits, determined by (seed, counter).
constexpr double keyed_uniform(std::uint64_t seed, std::uint64_t counter) noexcept {
  return static_cast<double>(mix_seed({seed, counter}) >> 11) * 0x1.0p-53;
}

using Engine = std::mt19937_64;

/// Sequential engine for streams that have no natural counter (long-range edge
/// lists, branching trees). Seeded from a mixed key.
inline Engine make_engine(std::initializer_list<std::uint64_t> words) {
  std::seed_seq seq{static_cast<std::uint32_t>(mix_seed(words)),
                    static_cast<std::uint32_t>(mix_seed(words) >> 32)};
  return Engine(seq);
}

}  // namespace percograph

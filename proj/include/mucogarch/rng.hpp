#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace mucogarch {

using Engine = std::mt19937_64;

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(std::string_view s,
                           std::uint64_t h = 0xCBF29CE484222325ULL) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

}  // namespace detail

/// Child seed for the (label, index) sub-stream of `seed`.
///
/// Every random quantity in the library is drawn from an engine seeded by
/// derive_seed(parent, label, index); the derivation is a pure function, so
/// results do not depend on evaluation order or on the number of workers.
inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view label,
                                 std::uint64_t index = 0) {
  std::uint64_t h = detail::splitmix64(seed);
  h = detail::splitmix64(h ^ detail::fnv1a(label));
  return detail::splitmix64(h ^ detail::splitmix64(index + 0x632BE59BD9B4E019ULL));
}

inline Engine make_engine(std::uint64_t seed, std::string_view label,
                          std::uint64_t index = 0) {
  return Engine(derive_seed(seed, label, index));
}

}  // namespace mucogarch

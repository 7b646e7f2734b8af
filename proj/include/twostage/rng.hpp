#pragma once

#include <cstdint>
#include <random>

namespace twostage {

using Rng = std::mt19937_64;

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Stable derivation of a child seed from (parent, stream).
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t stream) noexcept {
  return mix64(mix64(parent) ^ mix64(stream + 0x632BE59BD9B4E019ULL));
}

inline Rng make_rng(std::uint64_t seed) { return Rng{mix64(seed)}; }

}  // namespace twostage

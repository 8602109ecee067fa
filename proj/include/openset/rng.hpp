#pragma once

#include <cstdint>
#include <random>

namespace openset {

/// splitmix64 finalizer; used to derive independent stream seeds from one
/// user seed (per class, per restart, per tree).
constexpr std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

using Rng = std::mt19937_64;

}  // namespace openset

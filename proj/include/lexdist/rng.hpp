#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace lexdist {

using Rng = std::mt19937_64;

// Derives an independent, reproducible stream from a base seed and a
// component tag, so every stochastic step of a run is pinned by one seed.
inline Rng make_rng(std::uint64_t seed, std::string_view stream) {
  // FNV-1a over the tag, mixed with the seed (splitmix64 finalizer).
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : stream) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull + h;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  z ^= z >> 31;
  return Rng(z);
}

}  // namespace lexdist

#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace hdseizure {

// SplitMix64 finalizer, used to derive independent sub-seeds from one
// experiment seed (e.g. one stream per item vector).
constexpr std::uint64_t MixSeed(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t stream,
                                   std::uint64_t index = 0) noexcept {
  return MixSeed(MixSeed(seed ^ MixSeed(stream)) + index);
}

// Uniform integer in [0, bound) straight from the engine. std distributions
// are implementation-defined; this keeps sampling identical across stdlibs.
inline std::uint64_t UniformBelow(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t r = rng();
  while (r >= limit) r = rng();
  return r % bound;
}

template <typename T>
void Shuffle(std::span<T> items, std::mt19937_64& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::swap(items[i - 1], items[UniformBelow(rng, i)]);
  }
}

}  // namespace hdseizure

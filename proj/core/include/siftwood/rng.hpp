#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace siftwood {

/// Portable seeded generator.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. The standard distributions are not portable, so the conversions
/// below are spelled out:
///   uniform01()      = (next() >> 11) * 2^-53, a double in [0, 1)
///   uniform_index(n) = rejection sampling on next() against the largest
///                      multiple of n that fits in 64 bits, then next() % n
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  std::uint64_t uniform_index(std::uint64_t n);

  // Box-Muller on two uniform01 draws; the cosine branch only.
  double normal(double mean, double stddev);

 private:
  std::mt19937_64 engine_;
};

/// Derives an independent stream seed from a base seed and a tag, so that
/// per-item randomness does not depend on processing order.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag);

/// Fisher-Yates shuffle driven by Rng::uniform_index.
template <typename T>
void shuffle(std::span<T> items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.uniform_index(i));
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace siftwood

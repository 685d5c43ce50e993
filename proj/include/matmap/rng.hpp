#pragma once

#include <cstdint>
#include <random>

namespace matmap {

/// mt19937_64 with hand-rolled output transforms. The standard distributions
/// are implementation-defined, so fixtures and seeded weights would not be
/// reproducible across toolchains through std::uniform_*_distribution.
class DetRng {
 public:
  explicit DetRng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n) for n >= 1.
  std::uint64_t uniform_int(std::uint64_t n) { return engine_() % n; }

 private:
  std::mt19937_64 engine_;
};

/// Stable 64-bit mix for deriving stream seeds from identifiers.
constexpr std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t x = a + 0x9e3779b97f4a7c15ull + b * 0xbf58476d1ce4e5b9ull;
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ull;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebull;
  x ^= x >> 31;
  return x;
}

}  // namespace matmap

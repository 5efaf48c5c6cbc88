#pragma once

#include <cstdint>

namespace kinc {

// Counter-based generator built on the SplitMix64 output function. Word i of
// stream `seed` is mix(seed + (i + 1) * 0x9E3779B97F4A7C15), so any index can
// be evaluated independently and the sequence is fixed across platforms and
// compilers.
class CounterRng {
 public:
  explicit constexpr CounterRng(std::uint64_t seed) noexcept : seed_(seed) {}

  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  constexpr std::uint64_t word(std::uint64_t index) const noexcept {
    return mix(seed_ + (index + 1) * 0x9E3779B97F4A7C15ULL);
  }

  // Uniform on the open interval (0,1) with 53-bit resolution. A zero draw is
  // rejected and replaced by a word from a far-away counter.
  double uniform_open(std::uint64_t index) const noexcept {
    for (std::uint64_t attempt = 0;; ++attempt) {
      const std::uint64_t bits = word(index + attempt * kRedrawStride) >> 11;
      if (bits != 0) return static_cast<double>(bits) * 0x1.0p-53;
    }
  }

  constexpr std::uint64_t seed() const noexcept { return seed_; }

 private:
  static constexpr std::uint64_t kRedrawStride = 0xD1B54A32D192ED03ULL;
  std::uint64_t seed_;
};

}  // namespace kinc

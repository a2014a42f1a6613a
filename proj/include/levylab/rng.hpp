#pragma once

#include <cmath>
#include <cstdint>

namespace levylab {

// Purpose tags separating the independent draw streams of one path.
namespace rng_purpose {
constexpr std::uint64_t wiener = 0;
constexpr std::uint64_t jump_counts = 1;
constexpr std::uint64_t jump_times = 2;
constexpr std::uint64_t jump_sizes = 3;
constexpr std::uint64_t jump_modes = 4;
}  // namespace rng_purpose

// Counter-based stream: draw i is a pure function of (key, i), so any draw can
// be regenerated without replaying the stream. Two segments built from the
// same (seed, path, purpose, salt) see identical draw sequences, which is the
// common-random-numbers coupling used when comparing runs on shifted windows.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t path, std::uint64_t purpose,
            std::uint64_t salt = 0)
      : key_(derive_key(seed, path, purpose, salt)) {}

  std::uint64_t key() const { return key_; }

  // i-th raw draw; equals the i-th output of sequential SplitMix64 started at key.
  std::uint64_t bits(std::uint64_t i) const {
    std::uint64_t z = key_ + (i + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform on [0,1) with 53 random bits.
  double uniform(std::uint64_t i) const {
    return double(bits(i) >> 11) * 0x1.0p-53;
  }

  // Standard normal; draw i consumes uniforms 2i and 2i+1 (Box-Muller, cosine
  // branch only, so the counter mapping stays index-stable).
  double normal(std::uint64_t i) const {
    double u1 = uniform(2 * i);
    double u2 = uniform(2 * i + 1);
    double r = std::sqrt(-2.0 * std::log1p(-u1));
    return r * std::cos(6.283185307179586476925286766559 * u2);
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  static std::uint64_t derive_key(std::uint64_t seed, std::uint64_t path,
                                  std::uint64_t purpose, std::uint64_t salt) {
    std::uint64_t k = mix(seed + 0x9E3779B97F4A7C15ULL);
    k = mix(k ^ (path + 0xD1B54A32D192ED03ULL));
    k = mix(k ^ (purpose + 0x8CB92BA72F3D8DD7ULL));
    k = mix(k ^ (salt + 0xABCC5167CCAD925FULL));
    return k;
  }

  std::uint64_t key_;
};

// Thin wrapper for purposes whose draw count is data-dependent (Poisson
// inversion). Keeps its own cursor into the underlying counter stream.
class SequentialRng {
 public:
  explicit SequentialRng(RngStream stream) : stream_(stream) {}

  double uniform() { return stream_.uniform(cursor_++); }

  // Knuth product-of-uniforms inversion; means above 500 are split in half to
  // keep exp(-mean) away from the double underflow threshold.
  std::uint64_t poisson(double mean) {
    if (mean <= 0.0) return 0;
    if (mean > 500.0) return poisson(mean / 2) + poisson(mean / 2);
    const double limit = std::exp(-mean);
    std::uint64_t k = 0;
    double p = 1.0;
    for (;;) {
      p *= uniform();
      if (p <= limit) return k;
      ++k;
    }
  }

 private:
  RngStream stream_;
  std::uint64_t cursor_ = 0;
};

}  // namespace levylab

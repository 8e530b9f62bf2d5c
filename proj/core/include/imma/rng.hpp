#pragma once

#include <cstdint>
#include <random>

namespace imma {

// SplitMix64 step; used both as a tiny generator and as a seed mixer.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Derives an independent stream seed from a master seed and up to three
// integer tags. Same inputs always give the same seed, so named substreams
// (selector / sampling / realization) are reproducible in isolation.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag_a,
                                 std::uint64_t tag_b = 0, std::uint64_t tag_c = 0) {
  std::uint64_t s = master;
  splitmix64(s);
  s ^= 0xD1B54A32D192ED03ULL * (tag_a + 1);
  splitmix64(s);
  s ^= 0x8CB92BA72F3D8DD7ULL * (tag_b + 1);
  splitmix64(s);
  s ^= 0xABCC5167CCAD925FULL * (tag_c + 1);
  return splitmix64(s);
}

// Maps a 64-bit word to a double in [0,1).
inline double to_unit_interval(std::uint64_t word) {
  return static_cast<double>(word >> 11) * 0x1.0p-53;
}

// A seeded random stream. One stream per logical randomness source; streams
// never share engines, so consuming one cannot perturb another.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }

  double uniform01() {
    return std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
  }

  bool bernoulli(double p) { return uniform01() < p; }

  // Inclusive bounds.
  int uniform_int(int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(engine_);
  }

  double normal(double mean, double stddev) {
    return std::normal_distribution<double>(mean, stddev)(engine_);
  }

  // Spawns an independent child stream; deterministic given the parent state.
  RngStream split() { return RngStream(engine_() ^ 0x9E3779B97F4A7C15ULL); }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace imma

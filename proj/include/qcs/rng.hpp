#pragma once

#include <cstdint>
#include <random>

namespace qcs {

// Seeded random stream with deterministic substream derivation.
//
// Substreams are derived from the original seed and a key (SplitMix64
// mixing), not from the engine position, so `substream(k)` yields the
// same stream no matter how much of the parent has been consumed.
// Parallel code gives each task its own substream keyed by task index,
// which keeps results identical to a serial run.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(mix(seed)) {}

  Rng substream(std::uint64_t key) const {
    return Rng(mix(seed_ ^ mix(key + 0x9e3779b97f4a7c15ull)));
  }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1), 53-bit resolution.
  double next_double() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform in [0, n). Modulo bias is negligible for the small n used here.
  std::uint64_t next_below(std::uint64_t n) { return engine_() % n; }

  bool bernoulli(double p) { return next_double() < p; }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace qcs

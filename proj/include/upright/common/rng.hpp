#pragma once

#include <cstdint>
#include <random>

namespace upright {

/// splitmix64; used to derive independent stream seeds from a run seed.
inline uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Per-component RNG stream. All stochastic code draws through one of these so
/// that a run seed plus a stream tag fully determines every sample.
class Rng {
 public:
  Rng() : engine_(0) {}
  explicit Rng(uint64_t seed) : engine_(seed) {}

  /// Derives a child stream; successive calls give distinct streams.
  Rng split() {
    uint64_t s = engine_();
    return Rng(s);
  }

  double uniform(double lo, double hi) {
    std::uniform_real_distribution<double> d(lo, hi);
    return d(engine_);
  }

  double normal(double mean = 0.0, double std = 1.0) {
    std::normal_distribution<double> d(mean, std);
    return d(engine_);
  }

  /// Integer in [0, n).
  int index(int n) {
    std::uniform_int_distribution<int> d(0, n - 1);
    return d(engine_);
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

/// Stream seed for a named component of a run.
inline uint64_t streamSeed(uint64_t runSeed, uint64_t tag) {
  uint64_t s = runSeed ^ (0x51ed2701a3c5e891ULL * (tag + 1));
  return splitmix64(s);
}

}  // namespace upright

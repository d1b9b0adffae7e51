#pragma once

#include <cstdint>
#include <random>

namespace crowdsense {

/// Deterministic random source. The bit stream comes from std::mt19937_64
/// (fully specified by the standard) and every sampler is implemented here
/// rather than with std::*_distribution, whose output differs between
/// standard libraries. Identical seeds therefore give identical streams on
/// any platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, bound).
  std::uint64_t integer(std::uint64_t bound);

  bool bernoulli(double p) { return uniform() < p; }

  double exponential(double mean);

  /// Box-Muller; one variate per call.
  double normal(double mean, double sigma);

  std::int64_t poisson(double lambda);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

/// SplitMix64 mix step for deriving substream seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag);

/// Independent substream: one generator per (seed, tag, index) triple.
/// Documented derivation so external tools can reproduce any substream.
inline Rng substream(std::uint64_t seed, std::uint64_t tag, std::uint64_t index) {
  return Rng(mix_seed(mix_seed(seed, tag), index));
}

}  // namespace crowdsense

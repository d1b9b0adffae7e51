#include "crowdsense/rng.hpp"

#include <cmath>

namespace crowdsense {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (tag + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t Rng::integer(std::uint64_t bound) {
  if (bound == 0) return 0;
  return static_cast<std::uint64_t>(
      (static_cast<unsigned __int128>(engine_()) * bound) >> 64);
}

double Rng::exponential(double mean) {
  return -mean * std::log1p(-uniform());
}

double Rng::normal(double mean, double sigma) {
  double u1 = 1.0 - uniform();  // (0, 1]
  double u2 = uniform();
  double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(6.28318530717958647692 * u2);
  return mean + sigma * z;
}

std::int64_t Rng::poisson(double lambda) {
  if (lambda <= 0.0) return 0;
  if (lambda < 30.0) {
    // Knuth's product method.
    double limit = std::exp(-lambda);
    double prod = uniform();
    std::int64_t n = 0;
    while (prod > limit) {
      ++n;
      prod *= uniform();
    }
    return n;
  }
  double approx = std::round(normal(lambda, std::sqrt(lambda)));
  return approx < 0.0 ? 0 : static_cast<std::int64_t>(approx);
}

}  // namespace crowdsense

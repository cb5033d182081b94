#include <cmath>

#include "scenopt/experiments.hpp"

namespace scenopt {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double RandomSource::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RandomSource::uniform_open() {
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double RandomSource::laplace(double mean, double scale) {
  const double v = uniform_open() - 0.5;
  const double tail = std::log1p(-2.0 * std::abs(v));
  return v < 0.0 ? mean + scale * tail : mean - scale * tail;
}

RandomSource RandomSource::substream(std::uint64_t index) const {
  return RandomSource(splitmix64(splitmix64(seed_) ^ splitmix64(~index)));
}

}  // namespace scenopt

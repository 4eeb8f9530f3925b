#include "ltm/rng.hpp"

#include <cmath>

namespace ltm {

u64 derive_seed(u64 master, StreamDomain domain, u64 index) {
  SplitMix64 sm{master};
  u64 a = sm.next();
  sm.state = a ^ (static_cast<u64>(domain) * 0xbf58476d1ce4e5b9ull);
  u64 b = sm.next();
  sm.state = b ^ (index * 0x94d049bb133111ebull);
  return sm.next();
}

u64 RandomStream::uniform_below(u64 bound) {
  if (bound == 0) throw ConfigError("uniform_below: bound must be positive");
  // Rejection below the largest multiple of bound; at most one extra draw in
  // expectation for any bound.
  u64 limit = ~u64{0} - (~u64{0} % bound);
  u64 x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % bound;
}

double RandomStream::normal() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_normal_;
  }
  double u1 = uniform01_open_zero();
  double u2 = uniform01();
  double r = std::sqrt(-2.0 * std::log(u1));
  double t = 6.283185307179586476925287 * u2;
  cached_normal_ = r * std::sin(t);
  has_cached_ = true;
  return r * std::cos(t);
}

double RandomStream::gamma(double shape, double scale) {
  if (!(shape > 0.0) || !(scale > 0.0))
    throw ConfigError("gamma: shape and scale must be positive");
  if (shape < 1.0) {
    // Boost: G(a) = G(a+1) * U^(1/a). exp may underflow to 0 for tiny shapes;
    // see header note.
    double u = uniform01_open_zero();
    return gamma(shape + 1.0, scale) * std::exp(std::log(u) / shape);
  }
  double d = shape - 1.0 / 3.0;
  double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = normal();
    double t = 1.0 + c * x;
    if (t <= 0.0) continue;
    double v = t * t * t;
    double u = uniform01_open_zero();
    double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v * scale;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v * scale;
  }
}

double RandomStream::laplace(double scale) {
  if (!(scale > 0.0)) throw ConfigError("laplace: scale must be positive");
  // Signed exponential: sign * Exp(scale) is exactly Laplace(0, scale) and
  // avoids the inverse-CDF endpoint singularities.
  double mag = -scale * std::log(uniform01_open_zero());
  return rademacher() > 0 ? mag : -mag;
}

}  // namespace ltm

#pragma once

#include <cstdint>
#include <random>

#include "ltm/common.hpp"

namespace ltm {

// splitmix64; used only to derive seeds for independent streams.
struct SplitMix64 {
  u64 state;
  u64 next() {
    u64 z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
};

// Domain tags keep streams derived from the same master seed and index
// (e.g. client 7's noise stream vs. share randomness for client 7) disjoint.
enum class StreamDomain : u64 {
  kSketch = 1,
  kClientNoise = 2,
  kShares = 3,
  kData = 4,
  kAnalysis = 5,
  kExperiment = 6,
  kTest = 7,
};

u64 derive_seed(u64 master, StreamDomain domain, u64 index);

// Deterministic random stream. The engine is mt19937_64, whose raw output is
// fully pinned by the C++ standard; the distributions below are implemented
// here (not via std::) because the standard leaves distribution algorithms
// implementation-defined, which would break reproducibility of results across
// toolchains.
class RandomStream {
 public:
  RandomStream(u64 master, StreamDomain domain, u64 index)
      : engine_(derive_seed(master, domain, index)) {}
  explicit RandomStream(u64 raw_seed) : engine_(raw_seed) {}

  u64 next_u64() { return engine_(); }

  // Unbiased integer in [0, bound) via rejection.
  u64 uniform_below(u64 bound);

  // 53-bit uniform in [0, 1).
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform in (0, 1]; used where log(u) must be finite.
  double uniform01_open_zero() {
    return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller (second value cached).
  double normal();

  // Gamma(shape, scale) via Marsaglia-Tsang squeeze-rejection; shape < 1 is
  // handled with the standard boost G(a) = G(a+1) * U^(1/a). For the tiny
  // shapes used here (~1/n) most samples underflow to subnormals or zero,
  // which is the true mass profile at double precision; aggregate sums are
  // dominated by the rare O(scale) samples and are unaffected.
  double gamma(double shape, double scale);

  // Laplace(0, scale) via inverse CDF.
  double laplace(double scale);

  // +1 or -1, equiprobable.
  int rademacher() { return (engine_() >> 63) ? 1 : -1; }

 private:
  std::mt19937_64 engine_;
  double cached_normal_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace ltm

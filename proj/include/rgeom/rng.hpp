#pragma once

#include <cstdint>

#include "rgeom/linalg.hpp"

namespace rgeom {

/// Deterministic splitmix64 stream. Used instead of <random> engines so
/// that reports are byte-identical across platforms and thread counts.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  /// Independent substream for (seed, sample index, purpose); mixing the
  /// labels keeps per-sample draws independent of evaluation order.
  static Rng stream(uint64_t seed, uint64_t sample, uint64_t purpose) {
    Rng r(seed ^ (0x9e3779b97f4a7c15ULL * (sample + 1)) ^
          (0xbf58476d1ce4e5b9ULL * (purpose + 1)));
    r.next_u64();
    return r;
  }

  uint64_t next_u64() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * next_double();
  }

  /// Vector with entries uniform in [-1, 1), rescaled to the given norm.
  Vec direction(int n, double target_norm) {
    Vec v(n);
    double len = 0.0;
    while (len < 1e-3) {  // reject near-zero draws
      for (int i = 0; i < n; ++i) v[i] = uniform(-1.0, 1.0);
      len = norm(v);
    }
    return v * (target_norm / len);
  }

  /// Unit vector.
  Vec unit(int n) { return direction(n, 1.0); }

 private:
  uint64_t state_;
};

}  // namespace rgeom

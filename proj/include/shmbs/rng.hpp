#pragma once

#include <cstdint>
#include <random>

#include "shmbs/common.hpp"

namespace shmbs {

// Deterministic random source. Variate transforms are implemented here
// rather than via std:: distributions so that a (seed, call sequence)
// pair yields the same stream on every build.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_material_(mix(seed)), engine_(seed_material_) {}

  // independent stream derived from this seed and a stream id; used for
  // parallel replications and backtest windows
  Rng spawn(std::uint64_t stream) const {
    return Rng(seed_material_ ^ (0x9e3779b97f4a7c15ull * (stream + 1)));
  }

  double uniform01() {
    // 53-bit mantissa draw in [0, 1)
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  double normal();
  VectorXd normal_vec(Eigen::Index n);
  double gamma(double shape);  // unit scale, Marsaglia-Tsang
  double chisq(double dof) { return 2.0 * gamma(0.5 * dof); }

  std::uint64_t raw() { return engine_(); }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    // splitmix64 finalizer
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_material_;
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace shmbs

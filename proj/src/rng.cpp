#include "shmbs/rng.hpp"

#include <cmath>

namespace shmbs {

double Rng::normal() {
  // Marsaglia polar method with cached spare
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform01() - 1.0;
    v = 2.0 * uniform01() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * f;
  has_spare_ = true;
  return u * f;
}

VectorXd Rng::normal_vec(Eigen::Index n) {
  VectorXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) out[i] = normal();
  return out;
}

double Rng::gamma(double shape) {
  if (shape <= 0.0) raise(Errc::dimension_mismatch, "gamma shape must be positive");
  if (shape < 1.0) {
    // boost to shape+1 and scale back
    const double u = uniform01();
    return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform01();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

}  // namespace shmbs

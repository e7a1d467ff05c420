#pragma once

#include <functional>

#include "shmbs/common.hpp"

namespace shmbs {

struct NelderMeadResult {
  VectorXd x;
  double fmin = 0.0;
  int evals = 0;
  bool converged = false;
};

// Derivative-free simplex minimizer. Deterministic for given start/steps.
NelderMeadResult nelder_mead(const std::function<double(const VectorXd&)>& f,
                             const VectorXd& x0, const VectorXd& steps,
                             int max_iter = 2000, double ftol = 1e-10);

}  // namespace shmbs

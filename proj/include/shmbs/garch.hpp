#pragma once

#include "shmbs/common.hpp"

namespace shmbs {

// Gaussian quasi-maximum-likelihood GARCH(1,1) fit of one return series.
struct GarchFit {
  double omega = 0.0;   // level, > 0
  double alpha = 0.0;   // ARCH coefficient
  double beta = 0.0;    // GARCH coefficient; alpha + beta < 1
  double mean = 0.0;    // sample mean removed before fitting
  VectorXd h;           // fitted conditional variances
  double loglik = 0.0;

  double unconditional_variance() const { return omega / (1.0 - alpha - beta); }
};

// Standardized (de-volatilized) returns, one column per series.
struct DeGarchSeries {
  MatrixXd values;
};

GarchFit fit_garch11(const VectorXd& returns);

// r_tilde_t = (r_t - rbar) / sqrt(h_t)
VectorXd degarch(const GarchFit& fit, const VectorXd& returns);

// Conditional-variance recursion continued past the fitted sample,
// used when standardizing out-of-sample returns with a frozen fit.
VectorXd degarch_extend(const GarchFit& fit, const VectorXd& fitted_returns,
                        const VectorXd& new_returns);

// Fit every column and stack the standardized residuals.
DeGarchSeries degarch_panel(const MatrixXd& returns, std::vector<GarchFit>* fits = nullptr);

// Empirical quantiles (linear interpolation) of the standardized
// residuals; the pair (lower, upper) thresholds for the hard indicator.
std::pair<double, double> hard_thresholds(const VectorXd& degarch_values, double q_lower,
                                          double q_upper);

}  // namespace shmbs

#pragma once

#include <string>
#include <vector>

#include "shmbs/common.hpp"

namespace shmbs {

// Lagged-driver regression design. Stacked columns are asset-major,
// then regime block, then lag: the coefficient for (asset i, regime j,
// base predictor b) sits at column i*cols_per_asset + j*k_base + b.
// Rows cover t = p+1 .. n; the regression term is zero for t <= p.
struct RegressionDesign {
  int n = 0;
  int p = 0;
  int m = 0;
  bool cross = false;
  bool regime_split = true;
  MatrixXd base;  // n_eff x (m * k_base), unmasked lagged drivers
  std::vector<std::string> names;

  int n_eff() const { return n - p; }
  int k_base() const { return cross ? m * p : p; }
  int cols_per_asset() const { return (regime_split ? 2 : 1) * k_base(); }
  int K() const { return m * cols_per_asset(); }
  int owner(int col) const { return col / cols_per_asset(); }

  static RegressionDesign build(const MatrixXd& driver, int p, bool cross, bool regime_split);

  // stacked design (n_eff * m) x K with regime-masked columns;
  // `regime` has length n, entries for t <= p are ignored
  MatrixXd stacked(const ArrayXi& regime) const;

  // regression term for each branch, rows t = p+1..n
  void xi_pair(const VectorXd& beta, MatrixXd& xi0, MatrixXd& xi1) const;

  // full-length regression term (zeros for t <= p) selected by the path
  MatrixXd xi_full(const VectorXd& beta, const ArrayXi& regime) const;
};

// Quadratic forms e_t' Sigma^{-1} e_t for both regime branches plus the
// log-determinant; shared by the likelihood and the threshold sampler.
void residual_quadforms(const MatrixXd& resid0, const MatrixXd& resid1,
                        const MatrixXd& Sigma_eps, VectorXd& q0, VectorXd& q1, double& logdet);

// Regime-switching Gaussian log-likelihood summed over t = p+1..n,
// including the full normalizing constant. The default kernel runs the
// time loop in fixed-size chunks under OpenMP; chunk partials are
// reduced in index order, so the result is bitwise independent of the
// thread count. The _serial variant is the plain reference loop.
double regime_loglik(const MatrixXd& resid0, const MatrixXd& resid1, const ArrayXi& regime_tail,
                     const MatrixXd& Sigma_eps);
double regime_loglik_serial(const MatrixXd& resid0, const MatrixXd& resid1,
                            const ArrayXi& regime_tail, const MatrixXd& Sigma_eps);

double loglik_from_quadforms(const VectorXd& q0, const VectorXd& q1, const ArrayXi& regime_tail,
                             double logdet, int m);

// Eq-style likelihood of the observation panel given states and the
// regime-switching regression: e_t = y_t - mu_t - kappa_t - xi_t^{(R_t)}.
double log_likelihood(const MatrixXd& y, const MatrixXd& mu, const MatrixXd& kappa,
                      const RegressionDesign& design, const VectorXd& beta,
                      const MatrixXd& Sigma_eps, const ArrayXi& regime_path, bool serial = false);

}  // namespace shmbs

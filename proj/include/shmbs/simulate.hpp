#pragma once

#include "shmbs/common.hpp"
#include "shmbs/regime.hpp"
#include "shmbs/rng.hpp"

namespace shmbs {

// Synthetic-data configuration: AR(3) drivers feeding regime-switching
// regression terms on top of trend and seasonal components with
// isotropic noise.
struct SimConfig {
  int m = 3;
  int n = 500;
  MatrixXd phi;            // m x 3 AR coefficients per series
  VectorXd sigma2_driver;  // innovation variances
  MatrixXd beta0, beta1;   // m x 3 regime-wise regression coefficients
  double sigma2_u = 0.02, sigma2_v = 0.05, sigma2_w = 0.02, sigma2_eps = 0.55;
  VectorXd rho_true;       // slope learning rates
  VectorXd d_true;         // long-run slopes
  std::vector<int> s_true; // seasonal periods
  double q_L = 0.3, q_U = 0.7;
  double k_star = 2.0 / 3.0;
  int burn_in = 200;       // AR(3) spin-up, discarded

  static SimConfig table_defaults();  // the simulation-study setting
  void validate() const;
};

struct RegimeSimPath {
  ArrayXXi per_asset;  // n x m
  ArrayXi global;      // n
};

struct LatentTruth {
  MatrixXd mu, delta, kappa;  // n x m observed component values
  MatrixXd xi;                // regime-selected regression term (0 for t <= 3)
  MatrixXd u, v, w;           // drawn state noises, rows 0..n-2
  MatrixXd eps;               // observation noise, n x m
};

// Stationary AR(3) drivers, burn-in discarded.
MatrixXd gen_ar3(const SimConfig& config, Rng& rng);

// Per-series hard-indicator paths with thresholds at the empirical
// (q_L, q_U) quantiles of the full sample, aggregated with k_star.
RegimeSimPath gen_regimes(const MatrixXd& x, double q_L, double q_U, double k_star,
                          int init = 0);

// Trend/seasonal recursions plus the regime-selected regression term and
// observation noise. Also returns the latent truth for exact checks.
MatrixXd gen_observations(const SimConfig& config, const MatrixXd& x, const ArrayXi& regimes,
                          Rng& rng, LatentTruth* truth = nullptr);

// theoretical stationary variance of one AR(3) series (discrete
// Lyapunov solve on the companion form)
double ar3_stationary_variance(const VectorXd& phi, double sigma2);

bool ar3_is_stationary(const VectorXd& phi);

}  // namespace shmbs

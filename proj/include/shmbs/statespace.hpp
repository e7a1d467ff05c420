#pragma once

#include <vector>

#include "shmbs/common.hpp"
#include "shmbs/config.hpp"
#include "shmbs/rng.hpp"

namespace shmbs {

// Gaussian linear state space
//   y_t     = Z a_t + eps_t,            eps_t ~ N(0, H)
//   a_{t+1} = c + T a_t + R eta_t,      eta_t ~ N(0, Q)
//   a_1 ~ N(a1, P1)
// System matrices are time-invariant here; the structural assembly
// below never needs time variation.
struct StateSpaceModel {
  MatrixXd Z, T, R, H, Q;
  VectorXd c;  // state intercept
  VectorXd a1;
  MatrixXd P1;

  Eigen::Index state_dim() const { return T.rows(); }
  Eigen::Index obs_dim() const { return Z.rows(); }
  Eigen::Index shock_dim() const { return R.cols(); }
  void validate() const;
};

// Structural pieces of the multivariate trend/seasonal/cyclical model.
struct MbsComponents {
  VectorXd D;            // long-run slope per series
  VectorXd rho;          // slope learning rate per series, in (0,1)
  VectorXd zeta;         // cyclical damping, in (0,1)
  VectorXd lambda;       // cyclical frequency, in [0, pi]
  MatrixXd Sigma_u, Sigma_v, Sigma_w;          // trend level / slope / seasonal noise
  MatrixXd Sigma_eta, Sigma_eta_star;          // cyclical noise pair
  MatrixXd Sigma_eps;                          // observation noise

  static MbsComponents defaults(const ModelSpec& spec);
};

// Index bookkeeping for the block state vector. Per series i the block
// is [mu_i, delta_i, kappa_{i,t}, ..., kappa_{i,t-s_i+2} (, omega_i, omega*_i)].
struct StateLayout {
  int m = 0;
  std::vector<int> seasonal;
  bool cyclical = false;
  std::vector<int> offset;  // block start per series

  static StateLayout make(const ModelSpec& spec);
  int dim() const;
  int block_size(int i) const;
  int mu(int i) const { return offset[static_cast<std::size_t>(i)]; }
  int delta(int i) const { return mu(i) + 1; }
  int kappa0(int i) const { return mu(i) + 2; }
  int seasonal_states(int i) const { return seasonal[static_cast<std::size_t>(i)] - 1; }
  int omega(int i) const { return kappa0(i) + seasonal_states(i); }
  int omega_star(int i) const { return omega(i) + 1; }
};

// Block state-space matrices for the structural model: local linear
// trend per series, seasonal-sum block of size s_i - 1, optional damped
// cyclical rotation pair. H = Sigma_eps, Q block-diagonal by component.
StateSpaceModel assemble(const ModelSpec& spec, const MbsComponents& comps);

struct KalmanOutput {
  double loglik = 0.0;
  MatrixXd a_pred;                  // n x d, a_t = E[alpha_t | y_{1:t-1}]
  MatrixXd a_filt;                  // n x d, E[alpha_t | y_{1:t}]
  std::vector<MatrixXd> P_pred;
  std::vector<MatrixXd> P_filt;
  MatrixXd innovations;             // n x p, v_t
  std::vector<MatrixXd> Finv;       // innovation precision per step
  std::vector<MatrixXd> K;          // Kalman gain per step
};

KalmanOutput kalman_filter(const StateSpaceModel& model, const MatrixXd& y);

// Smoothed means E[alpha_t | y_{1:n}], one row per time point.
MatrixXd kalman_smoother(const StateSpaceModel& model, const KalmanOutput& filt);

struct SmootherOutput {
  MatrixXd alpha_hat;           // n x d
  std::vector<MatrixXd> V;      // smoothed covariances, symmetrized
  double max_asymmetry = 0.0;   // largest |V - V'| entry seen before symmetrization
};

SmootherOutput kalman_smoother_cov(const StateSpaceModel& model, const KalmanOutput& filt);

// One draw from p(alpha | y): simulate an unconditional pair
// (alpha+, y+), smooth both the data and the simulated observations,
// and correct the simulated path by the difference of smoothed means.
MatrixXd simulation_smoother(const StateSpaceModel& model, const MatrixXd& y, Rng& rng);

}  // namespace shmbs

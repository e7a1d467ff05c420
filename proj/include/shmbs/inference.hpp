#pragma once

#include <functional>
#include <vector>

#include "shmbs/common.hpp"
#include "shmbs/config.hpp"
#include "shmbs/likelihood.hpp"
#include "shmbs/regime.hpp"
#include "shmbs/rng.hpp"
#include "shmbs/statespace.hpp"

namespace shmbs {

// Quantile levels generating the hysteresis thresholds.
struct ThetaOne {
  double q_h_L = 0.0, q_h_U = 0.0, q_s_L = 0.0, q_s_U = 0.0;

  VectorXd as_vector() const;
  static ThetaOne from_vector(const VectorXd& v);
};

// Nested-uniform prior on the quantile levels:
//   q_L ~ Unif(a1, b1),  q_U | q_L ~ Unif(q_L + c*, b2)
// with a1 = h, b2 = 1 - h, and b1 capped so the conditional support is
// never empty. The same bounds apply to the hard and soft pairs.
struct ThetaOnePrior {
  double lo = 0.0;     // a1
  double hi_L = 0.0;   // b1
  double hi_U = 0.0;   // b2
  double c_star = 0.0;

  static ThetaOnePrior from_spec(const PriorSpec& prior);
  bool in_support(const ThetaOne& t) const;
  double log_density(const ThetaOne& t) const;
  ThetaOne midpoint() const;
  ThetaOne sample(Rng& rng) const;
};

// Random-walk Metropolis during burn-in, then an independence sampler
// whose proposal is the Gaussian fitted to the burn-in iterates.
class AdaptiveMetropolis {
 public:
  AdaptiveMetropolis(int dim, double scale_c, int burn_in, double init_var = 1e-3);

  VectorXd step(const VectorXd& current, double current_logp,
                const std::function<double(const VectorXd&)>& log_target, Rng& rng,
                double* new_logp = nullptr);

  bool adapted() const { return adapted_; }
  double acceptance_rate_burnin() const;
  double acceptance_rate_post() const;

  static double accept_probability(double cur_logp, double prop_logp, double log_hastings = 0.0);

 private:
  void adapt();
  double proposal_logpdf(const VectorXd& x) const;

  int dim_;
  int burn_in_;
  long iter_ = 0;
  MatrixXd rw_chol_;
  std::vector<VectorXd> history_;
  VectorXd adapt_mean_;
  MatrixXd adapt_chol_;
  double adapt_logdet_ = 0.0;
  bool adapted_ = false;
  long acc_burn_ = 0, n_burn_ = 0, acc_post_ = 0, n_post_ = 0;
};

// Wishart / inverse-Wishart draws via the Bartlett factorization.
MatrixXd draw_wishart(double dof, const MatrixXd& scale, Rng& rng);
MatrixXd draw_inverse_wishart(double dof, const MatrixXd& scale, Rng& rng);

// Conjugate covariance update for one state component:
//   Sigma ~ IW(w + n_resid, diag(W) + resid resid')
MatrixXd sample_covariance_block(const MatrixXd& resid, double w, const VectorXd& W_diag,
                                 Rng& rng);

// Whitening by the upper-triangular Cholesky factor of Sigma_eps:
// Psi = (U^{-1})' kron I_n applied to the series-stacked system.
struct Whitened {
  VectorXd Ystar;   // length n*m, series-major
  MatrixXd Zstar;   // (n*m) x K
};
Whitened whiten(const MatrixXd& Ymat, const MatrixXd& Zstacked, const MatrixXd& Sigma_eps);

// Per-iteration sufficient statistics for the regression block.
struct SsvsWorkspace {
  MatrixXd Gstar;  // Zstar' Zstar
  VectorXd pstar;  // Zstar' Ystar
  MatrixXd D;      // psi * Z'Z / n_eff (full-model prior information)

  static SsvsWorkspace make(const MatrixXd& Ymat, const MatrixXd& Zstacked,
                            const MatrixXd& Sigma_eps, double psi);
};

// marginal log weight of an inclusion configuration (beta integrated out)
double gamma_config_log_weight(const SsvsWorkspace& ws, const std::vector<int>& active,
                               const VectorXd& pi, double c_gamma);

// One stochastic-search sweep over all inclusion bits in random order.
ArrayXi sample_gamma(const SsvsWorkspace& ws, const VectorXd& pi, double c_gamma, ArrayXi gamma,
                     Rng& rng);

// Gaussian conditional of the active coefficients: mean (full length,
// zeros at inactive entries) and covariance of the active block.
std::pair<VectorXd, MatrixXd> beta_posterior_moments(const SsvsWorkspace& ws,
                                                     const ArrayXi& gamma, double c_gamma);

// Draw the active coefficients from their Gaussian conditional;
// inactive entries are exact zeros.
VectorXd sample_beta(const SsvsWorkspace& ws, const ArrayXi& gamma, double c_gamma, Rng& rng);

MatrixXd sample_sigma_eps(const MatrixXd& Ymat, const MatrixXd& Zstacked, const VectorXd& beta,
                          double phi, const VectorXd& nu_diag, Rng& rng);

// Everything the regime side of the sampler needs: driver and soft
// panels plus their sorted training copies for the quantile map.
struct RegimeInputs {
  RegimeType type = RegimeType::I;
  double k_star = 2.0 / 3.0;
  int init = 0;
  MatrixXd driver;  // n x m
  MatrixXd soft;    // n x m; may be empty for type I

  std::vector<VectorXd> driver_sorted, soft_sorted;

  static RegimeInputs make(const ModelSpec& spec, const MatrixXd& driver, const MatrixXd& soft);
  RegimeThresholds thresholds(const ThetaOne& t) const;
  ArrayXi path(const ThetaOne& t) const;  // length n, aggregated
};

struct PosteriorDraws {
  int n_iter = 0, burn_in = 0;
  std::uint64_t seed = 0;
  MatrixXd theta1;                      // n_iter x 4
  MatrixXd tau;                         // n_iter x 4m: hard L/U, soft L/U per asset
  std::vector<MatrixXd> Sigma_u, Sigma_v, Sigma_w, Sigma_eps;
  MatrixXd beta;                        // n_iter x K
  Eigen::MatrixXi gamma;                // n_iter x K
  std::vector<std::string> beta_names;
  VectorXd loglik;                      // Eq-style likelihood at the drawn state
  MatrixXd mean_mu, mean_delta, mean_kappa;  // post-burn-in posterior means, n x m
  std::vector<MatrixXd> state_paths;    // thinned post-burn-in state draws
  VectorXd regime1_freq;                // post-burn-in share of R_t = 1
  ArrayXi last_regime_path;
  double accept_burnin = 0.0, accept_post = 0.0;

  VectorXd beta_mean() const;           // over post-burn-in draws
  VectorXd inclusion_freq() const;
  VectorXd tau_mean() const;
  MatrixXd sigma_mean(const std::vector<MatrixXd>& chain) const;
};

// Full four-block sampler; one call fits one training window.
PosteriorDraws run_mcmc(const ModelSpec& spec, const MatrixXd& y, const RegimeInputs& inputs,
                        Rng& rng);

// Trend and seasonal hyperparameters read off the latent-state draws:
// AR(1) fits on the slope paths give (D_i, rho_i), the fundamental
// periodogram peak of the seasonal paths gives s_i.
struct HyperEstimates {
  VectorXd trend_d, trend_rho;
  std::vector<int> seasonal;
};

// single-path variant
HyperEstimates estimate_hyperparams(const MatrixXd& delta, const MatrixXd& kappa);

// Aggregated over stored state draws: rho/D averaged, s by modal vote.
// Posterior draws carry the state noise, so the AR(1) slope is read off
// without the attenuation a smoothed mean path would introduce.
HyperEstimates estimate_hyperparams(const std::vector<MatrixXd>& state_draws,
                                    const StateLayout& layout);

// slope/intercept OLS of x_{t+1} on x_t; returns rho, fills intercept
double ar1_ols(const VectorXd& x, double* intercept = nullptr);

// Period of the lowest significant interior periodogram peak, rounded
// to the nearest integer >= 2. Seasonal-sum paths put comparable power
// on the fundamental and its harmonics; taking the lowest peak rather
// than the argmax keeps harmonics from halving the period. Throws
// FlatSpectrum when Fisher's test finds no significant peak at all.
int periodogram_period(const VectorXd& x, double significance = 0.01,
                       double rel_threshold = 0.05);

}  // namespace shmbs

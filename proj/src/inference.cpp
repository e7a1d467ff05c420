#include "shmbs/inference.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <limits>
#include <numeric>

namespace shmbs {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

}  // namespace

// ---------------------------------------------------------------- theta1

VectorXd ThetaOne::as_vector() const {
  VectorXd v(4);
  v << q_h_L, q_h_U, q_s_L, q_s_U;
  return v;
}

ThetaOne ThetaOne::from_vector(const VectorXd& v) {
  if (v.size() != 4) raise(Errc::dimension_mismatch, "theta1 has four components");
  return {v[0], v[1], v[2], v[3]};
}

ThetaOnePrior ThetaOnePrior::from_spec(const PriorSpec& prior) {
  ThetaOnePrior p;
  p.lo = prior.h;
  p.hi_U = 1.0 - prior.h;
  // cap the lower-level support so Unif(q_L + c*, b2) is never empty
  p.hi_L = std::min(1.0 - 2.0 * prior.h, p.hi_U - prior.c_star - 1e-9);
  p.c_star = prior.c_star;
  if (!(p.lo < p.hi_L)) raise(Errc::config_error, "empty theta1 prior support; lower h or c_star");
  return p;
}

bool ThetaOnePrior::in_support(const ThetaOne& t) const {
  const auto pair_ok = [this](double qL, double qU) {
    return qL > lo && qL < hi_L && qU > qL + c_star && qU < hi_U;
  };
  return pair_ok(t.q_h_L, t.q_h_U) && pair_ok(t.q_s_L, t.q_s_U);
}

double ThetaOnePrior::log_density(const ThetaOne& t) const {
  if (!in_support(t)) return kNegInf;
  const auto pair_logpdf = [this](double qL) {
    return -std::log(hi_L - lo) - std::log(hi_U - (qL + c_star));
  };
  return pair_logpdf(t.q_h_L) + pair_logpdf(t.q_s_L);
}

ThetaOne ThetaOnePrior::midpoint() const {
  ThetaOne t;
  t.q_h_L = t.q_s_L = 0.5 * (lo + hi_L);
  t.q_h_U = t.q_s_U = 0.5 * (t.q_h_L + c_star + hi_U);
  return t;
}

ThetaOne ThetaOnePrior::sample(Rng& rng) const {
  ThetaOne t;
  t.q_h_L = rng.uniform(lo, hi_L);
  t.q_h_U = rng.uniform(t.q_h_L + c_star, hi_U);
  t.q_s_L = rng.uniform(lo, hi_L);
  t.q_s_U = rng.uniform(t.q_s_L + c_star, hi_U);
  return t;
}

// ---------------------------------------------------- adaptive Metropolis

AdaptiveMetropolis::AdaptiveMetropolis(int dim, double scale_c, int burn_in, double init_var)
    : dim_(dim), burn_in_(burn_in) {
  rw_chol_ = std::sqrt(scale_c * init_var) * MatrixXd::Identity(dim, dim);
  history_.reserve(static_cast<std::size_t>(burn_in));
}

double AdaptiveMetropolis::accept_probability(double cur_logp, double prop_logp,
                                              double log_hastings) {
  if (prop_logp == kNegInf) return 0.0;
  if (cur_logp == kNegInf) return 1.0;
  return std::min(1.0, std::exp(prop_logp - cur_logp + log_hastings));
}

double AdaptiveMetropolis::proposal_logpdf(const VectorXd& x) const {
  const VectorXd z = adapt_chol_.triangularView<Eigen::Lower>().solve(x - adapt_mean_);
  return -0.5 * (dim_ * kLog2Pi + adapt_logdet_ + z.squaredNorm());
}

void AdaptiveMetropolis::adapt() {
  const auto nh = static_cast<double>(history_.size());
  adapt_mean_ = VectorXd::Zero(dim_);
  for (const auto& h : history_) adapt_mean_ += h;
  adapt_mean_ /= std::max(nh, 1.0);
  MatrixXd cov = MatrixXd::Zero(dim_, dim_);
  for (const auto& h : history_) {
    const VectorXd d = h - adapt_mean_;
    cov += d * d.transpose();
  }
  cov /= std::max(nh - 1.0, 1.0);
  cov += 1e-8 * MatrixXd::Identity(dim_, dim_);
  Eigen::LLT<MatrixXd> llt(cov);
  adapt_chol_ = llt.matrixL();
  adapt_logdet_ = 0.0;
  for (int i = 0; i < dim_; ++i) adapt_logdet_ += 2.0 * std::log(adapt_chol_(i, i));
  adapted_ = true;
}

VectorXd AdaptiveMetropolis::step(const VectorXd& current, double current_logp,
                                  const std::function<double(const VectorXd&)>& log_target,
                                  Rng& rng, double* new_logp) {
  if (iter_ == burn_in_ && !adapted_ && !history_.empty()) adapt();
  ++iter_;

  VectorXd next = current;
  double next_logp = current_logp;
  if (!adapted_) {
    const VectorXd prop = current + rw_chol_ * rng.normal_vec(dim_);
    const double prop_logp = log_target(prop);
    ++n_burn_;
    if (rng.uniform01() < accept_probability(current_logp, prop_logp)) {
      next = prop;
      next_logp = prop_logp;
      ++acc_burn_;
    }
    history_.push_back(next);
  } else {
    const VectorXd prop = adapt_mean_ + adapt_chol_ * rng.normal_vec(dim_);
    const double prop_logp = log_target(prop);
    // independence kernel: correct by the proposal density ratio
    const double log_hastings = proposal_logpdf(current) - proposal_logpdf(prop);
    ++n_post_;
    if (rng.uniform01() < accept_probability(current_logp, prop_logp, log_hastings)) {
      next = prop;
      next_logp = prop_logp;
      ++acc_post_;
    }
  }
  if (new_logp) *new_logp = next_logp;
  return next;
}

double AdaptiveMetropolis::acceptance_rate_burnin() const {
  return n_burn_ > 0 ? static_cast<double>(acc_burn_) / static_cast<double>(n_burn_) : 0.0;
}

double AdaptiveMetropolis::acceptance_rate_post() const {
  return n_post_ > 0 ? static_cast<double>(acc_post_) / static_cast<double>(n_post_) : 0.0;
}

// ------------------------------------------------------ Wishart sampling

MatrixXd draw_wishart(double dof, const MatrixXd& scale, Rng& rng) {
  const Eigen::Index m = scale.rows();
  if (!(dof > static_cast<double>(m) - 1.0))
    raise(Errc::dimension_mismatch, "Wishart dof must exceed m - 1");
  Eigen::LLT<MatrixXd> llt(scale);
  if (llt.info() != Eigen::Success)
    raise(Errc::dimension_mismatch, "Wishart scale not positive definite");
  MatrixXd A = MatrixXd::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    A(i, i) = std::sqrt(rng.chisq(dof - static_cast<double>(i)));
    for (Eigen::Index j = 0; j < i; ++j) A(i, j) = rng.normal();
  }
  const MatrixXd LA = llt.matrixL() * A;
  return LA * LA.transpose();
}

MatrixXd draw_inverse_wishart(double dof, const MatrixXd& scale, Rng& rng) {
  const Eigen::Index m = scale.rows();
  Eigen::LLT<MatrixXd> llt(scale);
  if (llt.info() != Eigen::Success)
    raise(Errc::dimension_mismatch, "inverse-Wishart scale not positive definite");
  const MatrixXd scale_inv = llt.solve(MatrixXd::Identity(m, m));
  const MatrixXd W = draw_wishart(dof, 0.5 * (scale_inv + scale_inv.transpose()), rng);
  Eigen::LLT<MatrixXd> lltw(W);
  MatrixXd sigma = lltw.solve(MatrixXd::Identity(m, m));
  symmetrize(sigma);
  return sigma;
}

MatrixXd sample_covariance_block(const MatrixXd& resid, double w, const VectorXd& W_diag,
                                 Rng& rng) {
  const Eigen::Index m = W_diag.size();
  MatrixXd scale = MatrixXd::Zero(m, m);
  scale.diagonal() = W_diag;
  double n_resid = 0.0;
  if (resid.size() > 0) {
    if (resid.rows() != m) raise(Errc::dimension_mismatch, "residual block has wrong height");
    scale += resid * resid.transpose();
    n_resid = static_cast<double>(resid.cols());
  }
  symmetrize(scale);
  return draw_inverse_wishart(w + n_resid, scale, rng);
}

// ------------------------------------------------------------- whitening

Whitened whiten(const MatrixXd& Ymat, const MatrixXd& Zstacked, const MatrixXd& Sigma_eps) {
  const Eigen::Index n = Ymat.rows();
  const Eigen::Index m = Ymat.cols();
  if (Zstacked.rows() != n * m) raise(Errc::dimension_mismatch, "stacked design height mismatch");
  Eigen::LLT<MatrixXd> llt(Sigma_eps);
  if (llt.info() != Eigen::Success || llt.matrixLLT().diagonal().minCoeff() <= 0.0)
    raise(Errc::singular_sigma_eps, "observation covariance not positive definite");

  // Sigma = U'U with U = L'; post-multiplying the n x m panel by U^{-1}
  // applies Psi to the series-stacked vector
  const MatrixXd L = llt.matrixL();
  Whitened out;
  MatrixXd Ystar_mat = L.triangularView<Eigen::Lower>().solve(Ymat.transpose()).transpose();
  out.Ystar = Eigen::Map<const VectorXd>(Ystar_mat.data(), n * m);

  out.Zstar.resize(n * m, Zstacked.cols());
  MatrixXd col_mat(n, m);
  for (Eigen::Index c = 0; c < Zstacked.cols(); ++c) {
    for (Eigen::Index i = 0; i < m; ++i) col_mat.col(i) = Zstacked.col(c).segment(i * n, n);
    const MatrixXd star = L.triangularView<Eigen::Lower>().solve(col_mat.transpose()).transpose();
    out.Zstar.col(c) = Eigen::Map<const VectorXd>(star.data(), n * m);
  }
  return out;
}

SsvsWorkspace SsvsWorkspace::make(const MatrixXd& Ymat, const MatrixXd& Zstacked,
                                  const MatrixXd& Sigma_eps, double psi) {
  const Whitened wh = whiten(Ymat, Zstacked, Sigma_eps);
  SsvsWorkspace ws;
  ws.Gstar = wh.Zstar.transpose() * wh.Zstar;
  ws.pstar = wh.Zstar.transpose() * wh.Ystar;
  ws.D = psi * (Zstacked.transpose() * Zstacked) / static_cast<double>(Ymat.rows());
  return ws;
}

// ------------------------------------------------------------------ SSVS

namespace {

double logdet_llt(const Eigen::LLT<MatrixXd>& llt) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < llt.matrixLLT().rows(); ++i) {
    const double d = llt.matrixLLT()(i, i);
    if (!(d > 0.0)) return kNegInf;
    s += 2.0 * std::log(d);
  }
  return s;
}

}  // namespace

double gamma_config_log_weight(const SsvsWorkspace& ws, const std::vector<int>& active,
                               const VectorXd& pi, double c_gamma) {
  const Eigen::Index K = pi.size();
  double logw = 0.0;
  std::vector<bool> in(static_cast<std::size_t>(K), false);
  for (int j : active) in[static_cast<std::size_t>(j)] = true;
  for (Eigen::Index j = 0; j < K; ++j) {
    const double pj = pi[j];
    if (in[static_cast<std::size_t>(j)]) {
      if (pj <= 0.0) return kNegInf;
      logw += std::log(pj);
    } else {
      if (pj >= 1.0) return kNegInf;
      logw += std::log1p(-pj);
    }
  }
  if (active.empty()) return logw;

  const auto ksz = static_cast<Eigen::Index>(active.size());
  MatrixXd Dsub(ksz, ksz), Asub(ksz, ksz);
  VectorXd psub(ksz);
  for (Eigen::Index a = 0; a < ksz; ++a) {
    psub[a] = ws.pstar[active[static_cast<std::size_t>(a)]];
    for (Eigen::Index b = 0; b < ksz; ++b) {
      Dsub(a, b) = ws.D(active[static_cast<std::size_t>(a)], active[static_cast<std::size_t>(b)]);
      Asub(a, b) = ws.Gstar(active[static_cast<std::size_t>(a)],
                            active[static_cast<std::size_t>(b)]) +
                   Dsub(a, b);
    }
  }

  Eigen::LLT<MatrixXd> lltD(Dsub);
  if (lltD.info() != Eigen::Success) return kNegInf;  // dead column: zero prior information
  const double ld_D = logdet_llt(lltD);
  if (ld_D == kNegInf) return kNegInf;

  Eigen::LLT<MatrixXd> lltA(Asub);
  if (lltA.info() != Eigen::Success) return kNegInf;
  const double ld_A = logdet_llt(lltA);

  const VectorXd c = VectorXd::Constant(ksz, c_gamma);
  const VectorXd Dc = Dsub * c;
  const VectorXd P = psub + Dc;
  const double quad = c.dot(Dc) - P.dot(lltA.solve(P));
  return logw + 0.5 * ld_D - 0.5 * ld_A - 0.5 * quad;
}

ArrayXi sample_gamma(const SsvsWorkspace& ws, const VectorXd& pi, double c_gamma, ArrayXi gamma,
                     Rng& rng) {
  const Eigen::Index K = pi.size();
  if (gamma.size() != K) raise(Errc::dimension_mismatch, "gamma length mismatch");

  // fresh random sweep order
  std::vector<int> order(static_cast<std::size_t>(K));
  std::iota(order.begin(), order.end(), 0);
  for (Eigen::Index i = K - 1; i > 0; --i) {
    const auto j = static_cast<Eigen::Index>(rng.uniform01() * static_cast<double>(i + 1));
    std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(std::min(j, i))]);
  }

  for (int idx : order) {
    std::vector<int> with, without;
    for (Eigen::Index j = 0; j < K; ++j) {
      if (j == idx) continue;
      if (gamma[j] == 1) {
        with.push_back(static_cast<int>(j));
        without.push_back(static_cast<int>(j));
      }
    }
    with.push_back(idx);
    std::sort(with.begin(), with.end());

    const double lw1 = gamma_config_log_weight(ws, with, pi, c_gamma);
    const double lw0 = gamma_config_log_weight(ws, without, pi, c_gamma);
    double p1;
    if (lw1 == kNegInf)
      p1 = 0.0;
    else if (lw0 == kNegInf)
      p1 = 1.0;
    else
      p1 = 1.0 / (1.0 + std::exp(lw0 - lw1));
    gamma[idx] = rng.uniform01() < p1 ? 1 : 0;
  }
  return gamma;
}

std::pair<VectorXd, MatrixXd> beta_posterior_moments(const SsvsWorkspace& ws,
                                                     const ArrayXi& gamma, double c_gamma) {
  const Eigen::Index K = gamma.size();
  VectorXd mean = VectorXd::Zero(K);
  std::vector<int> active;
  for (Eigen::Index j = 0; j < K; ++j)
    if (gamma[j] == 1) active.push_back(static_cast<int>(j));
  if (active.empty()) return {mean, MatrixXd()};
  const auto ksz = static_cast<Eigen::Index>(active.size());
  MatrixXd A(ksz, ksz);
  VectorXd P(ksz);
  for (Eigen::Index a = 0; a < ksz; ++a) {
    const int ja = active[static_cast<std::size_t>(a)];
    double Dc = 0.0;
    for (Eigen::Index b = 0; b < ksz; ++b) {
      const int jb = active[static_cast<std::size_t>(b)];
      A(a, b) = ws.Gstar(ja, jb) + ws.D(ja, jb);
      Dc += ws.D(ja, jb) * c_gamma;
    }
    P[a] = ws.pstar[ja] + Dc;
  }
  Eigen::LLT<MatrixXd> llt(A);
  if (llt.info() != Eigen::Success)
    raise(Errc::rank_deficient_design, "active design block is rank deficient");
  const VectorXd active_mean = llt.solve(P);
  const MatrixXd cov = llt.solve(MatrixXd::Identity(ksz, ksz));
  for (Eigen::Index a = 0; a < ksz; ++a) mean[active[static_cast<std::size_t>(a)]] = active_mean[a];
  return {mean, cov};
}

VectorXd sample_beta(const SsvsWorkspace& ws, const ArrayXi& gamma, double c_gamma, Rng& rng) {
  const Eigen::Index K = gamma.size();
  VectorXd beta = VectorXd::Zero(K);
  std::vector<int> active;
  for (Eigen::Index j = 0; j < K; ++j)
    if (gamma[j] == 1) active.push_back(static_cast<int>(j));
  if (active.empty()) return beta;

  const auto ksz = static_cast<Eigen::Index>(active.size());
  MatrixXd A(ksz, ksz);
  VectorXd P(ksz);
  for (Eigen::Index a = 0; a < ksz; ++a) {
    const int ja = active[static_cast<std::size_t>(a)];
    double Dc = 0.0;
    for (Eigen::Index b = 0; b < ksz; ++b) {
      const int jb = active[static_cast<std::size_t>(b)];
      A(a, b) = ws.Gstar(ja, jb) + ws.D(ja, jb);
      Dc += ws.D(ja, jb) * c_gamma;
    }
    P[a] = ws.pstar[ja] + Dc;
  }

  Eigen::LLT<MatrixXd> llt(A);
  if (llt.info() != Eigen::Success || llt.matrixLLT().diagonal().minCoeff() <= 0.0) {
    const MatrixXd Aj = A + (1e-10 * A.trace()) * MatrixXd::Identity(ksz, ksz);
    llt.compute(Aj);
    if (llt.info() != Eigen::Success || llt.matrixLLT().diagonal().minCoeff() <= 0.0)
      raise(Errc::rank_deficient_design, "active design block is rank deficient");
  }

  const VectorXd mean = llt.solve(P);
  // draw: mean + L^{-T} z gives covariance A^{-1}
  const VectorXd z = rng.normal_vec(ksz);
  const VectorXd drawn = mean + llt.matrixU().solve(z);
  for (Eigen::Index a = 0; a < ksz; ++a) beta[active[static_cast<std::size_t>(a)]] = drawn[a];
  return beta;
}

MatrixXd sample_sigma_eps(const MatrixXd& Ymat, const MatrixXd& Zstacked, const VectorXd& beta,
                          double phi, const VectorXd& nu_diag, Rng& rng) {
  const Eigen::Index n = Ymat.rows();
  const Eigen::Index m = Ymat.cols();
  const VectorXd fitted = Zstacked * beta;
  MatrixXd E(n, m);
  for (Eigen::Index i = 0; i < m; ++i) E.col(i) = Ymat.col(i) - fitted.segment(i * n, n);
  MatrixXd scale = MatrixXd::Zero(m, m);
  scale.diagonal() = nu_diag;
  scale += E.transpose() * E;
  symmetrize(scale);
  return draw_inverse_wishart(phi + static_cast<double>(n), scale, rng);
}

// --------------------------------------------------------- regime inputs

RegimeInputs RegimeInputs::make(const ModelSpec& spec, const MatrixXd& driver,
                                const MatrixXd& soft) {
  RegimeInputs ri;
  ri.type = spec.regime_type;
  ri.k_star = spec.k_star;
  ri.init = spec.regime_init;
  ri.driver = driver;
  ri.soft = soft;
  if (spec.regime_type != RegimeType::I &&
      (soft.rows() != driver.rows() || soft.cols() != driver.cols()))
    raise(Errc::misaligned_index, "soft panel required and must match the driver panel");
  for (Eigen::Index i = 0; i < driver.cols(); ++i)
    ri.driver_sorted.push_back(sorted_column(driver, static_cast<int>(i)));
  for (Eigen::Index i = 0; i < soft.cols(); ++i)
    ri.soft_sorted.push_back(sorted_column(soft, static_cast<int>(i)));
  return ri;
}

RegimeThresholds RegimeInputs::thresholds(const ThetaOne& t) const {
  const auto m = static_cast<Eigen::Index>(driver_sorted.size());
  RegimeThresholds thr;
  thr.q_h_L = t.q_h_L;
  thr.q_h_U = t.q_h_U;
  thr.q_s_L = t.q_s_L;
  thr.q_s_U = t.q_s_U;
  thr.tau_h_L.resize(m);
  thr.tau_h_U.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& col = driver_sorted[static_cast<std::size_t>(i)];
    const std::span<const double> s(col.data(), static_cast<std::size_t>(col.size()));
    thr.tau_h_L[i] = quantile_sorted(s, t.q_h_L);
    thr.tau_h_U[i] = quantile_sorted(s, t.q_h_U);
  }
  const auto ms = static_cast<Eigen::Index>(soft_sorted.size());
  thr.tau_s_L = VectorXd::Zero(ms);
  thr.tau_s_U = VectorXd::Zero(ms);
  for (Eigen::Index i = 0; i < ms; ++i) {
    const auto& col = soft_sorted[static_cast<std::size_t>(i)];
    const std::span<const double> s(col.data(), static_cast<std::size_t>(col.size()));
    thr.tau_s_L[i] = quantile_sorted(s, t.q_s_L);
    thr.tau_s_U[i] = quantile_sorted(s, t.q_s_U);
  }
  return thr;
}

ArrayXi RegimeInputs::path(const ThetaOne& t) const {
  const ArrayXXi per_asset = indicator_path(type, driver, soft, thresholds(t), init);
  return aggregate(per_asset, k_star, init);
}

// --------------------------------------------------------------- summary

VectorXd PosteriorDraws::beta_mean() const {
  const int kept = n_iter - burn_in;
  return beta.bottomRows(kept).colwise().mean().transpose();
}

VectorXd PosteriorDraws::inclusion_freq() const {
  const int kept = n_iter - burn_in;
  return gamma.bottomRows(kept).cast<double>().colwise().mean().transpose();
}

VectorXd PosteriorDraws::tau_mean() const {
  const int kept = n_iter - burn_in;
  return tau.bottomRows(kept).colwise().mean().transpose();
}

MatrixXd PosteriorDraws::sigma_mean(const std::vector<MatrixXd>& chain) const {
  MatrixXd acc = MatrixXd::Zero(chain.front().rows(), chain.front().cols());
  int kept = 0;
  for (int i = burn_in; i < n_iter; ++i) {
    acc += chain[static_cast<std::size_t>(i)];
    ++kept;
  }
  return acc / std::max(kept, 1);
}

// -------------------------------------------------------------- run_mcmc

PosteriorDraws run_mcmc(const ModelSpec& spec, const MatrixXd& y, const RegimeInputs& inputs,
                        Rng& rng) {
  spec.validate();
  const int n = static_cast<int>(y.rows());
  const int m = static_cast<int>(y.cols());
  const int p = spec.lag_order;
  if (m != spec.m) raise(Errc::dimension_mismatch, "panel width does not match spec.m");
  if (inputs.driver.rows() != n) raise(Errc::misaligned_index, "driver panel length mismatch");
  if (n < p + 2) raise(Errc::insufficient_history, "panel shorter than lag order + 2");

  const RegressionDesign design =
      RegressionDesign::build(inputs.driver, p, spec.cross_lags, spec.regime_enabled);
  const int K = design.K();
  const int ne = design.n_eff();

  // prior inclusion probabilities: p_i / k_i per asset, one value per column
  VectorXd pi(K);
  for (int c = 0; c < K; ++c) {
    const double p_exp = spec.prior.p_expected[design.owner(c)];
    pi[c] = std::clamp(p_exp / static_cast<double>(design.k_base()), 0.0, 1.0);
  }

  const ThetaOnePrior t1prior = ThetaOnePrior::from_spec(spec.prior);
  ThetaOne theta1 = t1prior.midpoint();
  ArrayXi Rpath =
      spec.regime_enabled ? inputs.path(theta1) : ArrayXi::Zero(n);

  // theta4 start: empty model, sample covariance of the observations
  VectorXd beta = VectorXd::Zero(K);
  ArrayXi gamma = ArrayXi::Zero(K);
  MatrixXd Sigma_eps;
  {
    const MatrixXd centered = y.rowwise() - y.colwise().mean();
    Sigma_eps = centered.transpose() * centered / std::max(n - 1, 1);
    Sigma_eps += 1e-8 * MatrixXd::Identity(m, m);
  }

  // theta3 start: prior scale
  const auto diag_of = [&](const VectorXd& w) {
    MatrixXd d = MatrixXd::Zero(m, m);
    d.diagonal() = w;
    return d;
  };
  MatrixXd Sigma_u = diag_of(spec.prior.W_u);
  MatrixXd Sigma_v = diag_of(spec.prior.W_v);
  MatrixXd Sigma_w = diag_of(spec.prior.W_w);

  MbsComponents comps = MbsComponents::defaults(spec);
  comps.Sigma_u = Sigma_u;
  comps.Sigma_v = Sigma_v;
  comps.Sigma_w = Sigma_w;
  comps.Sigma_eps = Sigma_eps;
  StateSpaceModel model = assemble(spec, comps);
  const StateLayout layout = StateLayout::make(spec);

  const auto update_model = [&] {
    model.H = Sigma_eps;
    model.Q.block(0, 0, m, m) = Sigma_u;
    model.Q.block(m, m, m, m) = Sigma_v;
    model.Q.block(2 * m, 2 * m, m, m) = Sigma_w;
  };

  const auto split_states = [&](const MatrixXd& alpha, MatrixXd& mu, MatrixXd& delta,
                                MatrixXd& kappa) {
    mu.resize(n, m);
    delta.resize(n, m);
    kappa.resize(n, m);
    for (int i = 0; i < m; ++i) {
      mu.col(i) = alpha.col(layout.mu(i));
      delta.col(i) = alpha.col(layout.delta(i));
      kappa.col(i) = alpha.col(layout.kappa0(i));
    }
  };

  // theta2 start: one smoother pass at the initial parameters
  MatrixXd alpha = kalman_smoother(model, kalman_filter(model, y));
  MatrixXd mu, delta, kappa;
  split_states(alpha, mu, delta, kappa);

  const McmcSpec& mc = spec.mcmc;
  AdaptiveMetropolis am(4, mc.rw_scale, mc.burn_in);

  PosteriorDraws out;
  out.n_iter = mc.n_iter;
  out.burn_in = mc.burn_in;
  out.beta_names = design.names;
  out.theta1.setZero(mc.n_iter, 4);
  out.tau.setZero(mc.n_iter, 4 * m);
  out.beta.setZero(mc.n_iter, K);
  out.gamma.setZero(mc.n_iter, K);
  out.loglik.setZero(mc.n_iter);
  out.Sigma_u.reserve(static_cast<std::size_t>(mc.n_iter));
  out.Sigma_v.reserve(static_cast<std::size_t>(mc.n_iter));
  out.Sigma_w.reserve(static_cast<std::size_t>(mc.n_iter));
  out.Sigma_eps.reserve(static_cast<std::size_t>(mc.n_iter));
  out.mean_mu = MatrixXd::Zero(n, m);
  out.mean_delta = MatrixXd::Zero(n, m);
  out.mean_kappa = MatrixXd::Zero(n, m);
  out.regime1_freq = VectorXd::Zero(n);
  int kept = 0;

  for (int ell = 0; ell < mc.n_iter; ++ell) {
    // (a) quantile bounds via adaptive MH on the Eq-style likelihood
    if (spec.regime_enabled) {
      MatrixXd xi0, xi1;
      design.xi_pair(beta, xi0, xi1);
      const MatrixXd Yeff = (y - mu - kappa).bottomRows(ne);
      VectorXd q0, q1;
      double logdet = 0.0;
      residual_quadforms(Yeff - xi0, Yeff - xi1, Sigma_eps, q0, q1, logdet);

      const auto log_target = [&](const VectorXd& v) {
        const ThetaOne t = ThetaOne::from_vector(v);
        const double lp = t1prior.log_density(t);
        if (lp == kNegInf) return kNegInf;
        const ArrayXi path = inputs.path(t);
        return loglik_from_quadforms(q0, q1, path.tail(ne), logdet, m) + lp;
      };
      const double cur_logp = log_target(theta1.as_vector());
      theta1 = ThetaOne::from_vector(am.step(theta1.as_vector(), cur_logp, log_target, rng));
      Rpath = inputs.path(theta1);
    }

    // (b) latent states from the simulation smoother on regime-adjusted data
    update_model();
    const MatrixXd y_adj = y - design.xi_full(beta, Rpath);
    alpha = simulation_smoother(model, y_adj, rng);
    split_states(alpha, mu, delta, kappa);

    // (c) component covariances, conjugate inverse-Wishart updates
    {
      MatrixXd Au(m, n - 1), Av(m, n - 1), Aw(m, n - 1);
      for (int i = 0; i < m; ++i) {
        const int muix = layout.mu(i), deix = layout.delta(i), kix = layout.kappa0(i);
        const int ns = layout.seasonal_states(i);
        for (int t = 0; t + 1 < n; ++t) {
          Au(i, t) = alpha(t + 1, muix) - alpha(t, muix) - alpha(t, deix);
          Av(i, t) = alpha(t + 1, deix) - (1.0 - comps.rho[i]) * comps.D[i] -
                     comps.rho[i] * alpha(t, deix);
          double seasonal_sum = 0.0;
          for (int j = 0; j < ns; ++j) seasonal_sum += alpha(t, kix + j);
          Aw(i, t) = alpha(t + 1, kix) + seasonal_sum;
        }
      }
      Sigma_u = sample_covariance_block(Au, spec.prior.w_u, spec.prior.W_u, rng);
      Sigma_v = sample_covariance_block(Av, spec.prior.w_v, spec.prior.W_v, rng);
      Sigma_w = sample_covariance_block(Aw, spec.prior.w_w, spec.prior.W_w, rng);
    }

    // (d) regression block: SSVS, coefficients, observation covariance
    {
      const MatrixXd Yeff = (y - mu - kappa).bottomRows(ne);
      const MatrixXd Zst = design.stacked(Rpath);
      const SsvsWorkspace ws = SsvsWorkspace::make(Yeff, Zst, Sigma_eps, spec.prior.psi);
      gamma = sample_gamma(ws, pi, spec.prior.c_gamma, gamma, rng);
      beta = sample_beta(ws, gamma, spec.prior.c_gamma, rng);
      Sigma_eps = sample_sigma_eps(Yeff, Zst, beta, spec.prior.phi, spec.prior.nu, rng);
    }

    // record
    out.theta1.row(ell) = theta1.as_vector().transpose();
    if (spec.regime_enabled) {
      const RegimeThresholds thr = inputs.thresholds(theta1);
      out.tau.block(ell, 0, 1, m) = thr.tau_h_L.transpose();
      out.tau.block(ell, m, 1, m) = thr.tau_h_U.transpose();
      if (thr.tau_s_L.size() == m) {
        out.tau.block(ell, 2 * m, 1, m) = thr.tau_s_L.transpose();
        out.tau.block(ell, 3 * m, 1, m) = thr.tau_s_U.transpose();
      }
    }
    out.beta.row(ell) = beta.transpose();
    out.gamma.row(ell) = gamma.matrix().transpose();
    out.Sigma_u.push_back(Sigma_u);
    out.Sigma_v.push_back(Sigma_v);
    out.Sigma_w.push_back(Sigma_w);
    out.Sigma_eps.push_back(Sigma_eps);
    out.loglik[ell] =
        log_likelihood(y, mu, kappa, design, beta, Sigma_eps, Rpath);

    if (ell >= mc.burn_in) {
      out.mean_mu += mu;
      out.mean_delta += delta;
      out.mean_kappa += kappa;
      out.regime1_freq += Rpath.cast<double>().matrix();
      if ((ell - mc.burn_in) % mc.report_thin == 0) out.state_paths.push_back(alpha);
      ++kept;
    }
  }

  if (kept > 0) {
    out.mean_mu /= kept;
    out.mean_delta /= kept;
    out.mean_kappa /= kept;
    out.regime1_freq /= kept;
  } else {
    // zero-iteration or all-burn-in run: report the initial state
    out.mean_mu = mu;
    out.mean_delta = delta;
    out.mean_kappa = kappa;
  }
  out.last_regime_path = Rpath;
  out.accept_burnin = am.acceptance_rate_burnin();
  out.accept_post = am.acceptance_rate_post();
  return out;
}

// ------------------------------------------------- hyperparameter checks

double ar1_ols(const VectorXd& x, double* intercept) {
  const Eigen::Index n = x.size();
  if (n < 3) raise(Errc::insufficient_history, "AR(1) fit needs at least 3 points");
  const VectorXd x0 = x.head(n - 1);
  const VectorXd x1 = x.tail(n - 1);
  const double mx = mean(x0), my = mean(x1);
  double sxx = 0.0, sxy = 0.0;
  for (Eigen::Index t = 0; t < n - 1; ++t) {
    sxx += (x0[t] - mx) * (x0[t] - mx);
    sxy += (x0[t] - mx) * (x1[t] - my);
  }
  if (!(sxx > 0.0)) raise(Errc::zero_variance, "constant path in AR(1) fit");
  const double rho = sxy / sxx;
  if (intercept) *intercept = my - rho * mx;
  return rho;
}

int periodogram_period(const VectorXd& x, double significance, double rel_threshold) {
  const Eigen::Index n = x.size();
  if (n < 8) raise(Errc::insufficient_history, "periodogram needs at least 8 points");
  const double xbar = mean(x);
  const Eigen::Index nfreq = (n - 1) / 2;
  if (nfreq < 2) raise(Errc::flat_spectrum, "too few Fourier frequencies");

  VectorXd I(nfreq);
  double total = 0.0;
  for (Eigen::Index j = 1; j <= nfreq; ++j) {
    double re = 0.0, im = 0.0;
    const double w = 2.0 * M_PI * static_cast<double>(j) / static_cast<double>(n);
    for (Eigen::Index t = 0; t < n; ++t) {
      const double c = x[t] - xbar;
      re += c * std::cos(w * static_cast<double>(t));
      im -= c * std::sin(w * static_cast<double>(t));
    }
    I[j - 1] = (re * re + im * im) / static_cast<double>(n);
    total += I[j - 1];
  }
  if (!(total > 0.0)) raise(Errc::flat_spectrum, "zero spectrum");

  Eigen::Index best = 0;
  I.maxCoeff(&best);
  // Fisher's test for a periodic component in white noise
  const double g = I[best] / total;
  const double pval =
      std::min(1.0, static_cast<double>(nfreq) *
                        std::pow(std::max(0.0, 1.0 - g), static_cast<double>(nfreq) - 1.0));
  if (pval > significance) raise(Errc::flat_spectrum, "no significant interior peak");

  // fundamental: lowest-frequency local peak with a sizable share of the
  // maximum ordinate (leakage bins next to a peak are not local maxima)
  Eigen::Index fundamental = best;
  for (Eigen::Index j = 0; j < nfreq; ++j) {
    const bool sizable = I[j] >= rel_threshold * I[best];
    const bool local_max =
        (j == 0 || I[j] >= I[j - 1]) && (j + 1 == nfreq || I[j] >= I[j + 1]);
    if (sizable && local_max) {
      fundamental = j;
      break;
    }
  }
  const double freq = static_cast<double>(fundamental + 1) / static_cast<double>(n);
  const int period = static_cast<int>(std::lround(1.0 / freq));
  return std::max(period, 2);
}

HyperEstimates estimate_hyperparams(const MatrixXd& delta, const MatrixXd& kappa) {
  const Eigen::Index m = delta.cols();
  HyperEstimates est;
  est.trend_d.resize(m);
  est.trend_rho.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    double c = 0.0;
    const double rho = ar1_ols(delta.col(i), &c);
    est.trend_rho[i] = rho;
    est.trend_d[i] = std::abs(1.0 - rho) > 1e-12 ? c / (1.0 - rho) : 0.0;
    est.seasonal.push_back(periodogram_period(kappa.col(i)));
  }
  return est;
}

HyperEstimates estimate_hyperparams(const std::vector<MatrixXd>& state_draws,
                                    const StateLayout& layout) {
  if (state_draws.empty()) raise(Errc::insufficient_history, "no stored state draws");
  const int m = layout.m;
  HyperEstimates est;
  est.trend_d = VectorXd::Zero(m);
  est.trend_rho = VectorXd::Zero(m);
  for (int i = 0; i < m; ++i) {
    std::map<int, int> votes;
    int flat = 0;
    for (const auto& alpha : state_draws) {
      double c = 0.0;
      const double rho = ar1_ols(alpha.col(layout.delta(i)), &c);
      est.trend_rho[i] += rho;
      est.trend_d[i] += std::abs(1.0 - rho) > 1e-12 ? c / (1.0 - rho) : 0.0;
      try {
        votes[periodogram_period(alpha.col(layout.kappa0(i)))]++;
      } catch (const Error&) {
        ++flat;
      }
    }
    const auto ndraw = static_cast<double>(state_draws.size());
    est.trend_rho[i] /= ndraw;
    est.trend_d[i] /= ndraw;
    if (votes.empty())
      raise(Errc::flat_spectrum,
            "no draw shows a seasonal peak for series " + std::to_string(i + 1));
    int mode = 0, count = 0;
    for (const auto& [s, c] : votes) {
      if (c > count) {
        count = c;
        mode = s;
      }
    }
    est.seasonal.push_back(mode);
    (void)flat;
  }
  return est;
}

}  // namespace shmbs

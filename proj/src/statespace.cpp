#include "shmbs/statespace.hpp"

#include <cmath>

namespace shmbs {

void StateSpaceModel::validate() const {
  const Eigen::Index d = state_dim();
  const Eigen::Index p = obs_dim();
  const Eigen::Index q = shock_dim();
  if (T.cols() != d || Z.cols() != d || R.rows() != d || c.size() != d || a1.size() != d ||
      P1.rows() != d || P1.cols() != d)
    raise(Errc::dimension_mismatch, "state dimension mismatch");
  if (H.rows() != p || H.cols() != p) raise(Errc::dimension_mismatch, "H dimension mismatch");
  if (Q.rows() != q || Q.cols() != q) raise(Errc::dimension_mismatch, "Q dimension mismatch");
}

MbsComponents MbsComponents::defaults(const ModelSpec& spec) {
  MbsComponents c;
  const int m = spec.m;
  c.D = spec.trend_d;
  c.rho = spec.trend_rho;
  c.zeta = spec.cycle_zeta;
  c.lambda = spec.cycle_lambda;
  c.Sigma_u = 0.01 * MatrixXd::Identity(m, m);
  c.Sigma_v = 0.01 * MatrixXd::Identity(m, m);
  c.Sigma_w = 0.01 * MatrixXd::Identity(m, m);
  c.Sigma_eta = 0.01 * MatrixXd::Identity(m, m);
  c.Sigma_eta_star = 0.01 * MatrixXd::Identity(m, m);
  c.Sigma_eps = MatrixXd::Identity(m, m);
  return c;
}

StateLayout StateLayout::make(const ModelSpec& spec) {
  StateLayout lay;
  lay.m = spec.m;
  lay.seasonal = spec.seasonal_periods;
  lay.cyclical = spec.cyclical_enabled;
  int off = 0;
  for (int i = 0; i < spec.m; ++i) {
    lay.offset.push_back(off);
    off += lay.block_size(i);
  }
  return lay;
}

int StateLayout::block_size(int i) const {
  return 2 + (seasonal[static_cast<std::size_t>(i)] - 1) + (cyclical ? 2 : 0);
}

int StateLayout::dim() const {
  int d = 0;
  for (int i = 0; i < m; ++i) d += block_size(i);
  return d;
}

StateSpaceModel assemble(const ModelSpec& spec, const MbsComponents& comps) {
  const int m = spec.m;
  if (comps.rho.size() != m || comps.D.size() != m || comps.Sigma_u.rows() != m ||
      comps.Sigma_v.rows() != m || comps.Sigma_w.rows() != m || comps.Sigma_eps.rows() != m)
    raise(Errc::dimension_mismatch, "component dimensions do not match spec.m");
  for (int i = 0; i < m; ++i) {
    if (!(comps.rho[i] > 0.0 && comps.rho[i] < 1.0))
      raise(Errc::dimension_mismatch, "rho entries must lie in (0,1)");
    if (spec.cyclical_enabled) {
      if (!(comps.zeta[i] > 0.0 && comps.zeta[i] < 1.0))
        raise(Errc::dimension_mismatch, "zeta entries must lie in (0,1)");
      if (!(comps.lambda[i] >= 0.0 && comps.lambda[i] <= M_PI))
        raise(Errc::dimension_mismatch, "lambda entries must lie in [0, pi]");
    }
  }

  const StateLayout lay = StateLayout::make(spec);
  const int d = lay.dim();
  const int ncomp = spec.cyclical_enabled ? 5 : 3;  // u, v, w (, eta, eta*)
  const int q = ncomp * m;

  StateSpaceModel ss;
  ss.Z = MatrixXd::Zero(m, d);
  ss.T = MatrixXd::Zero(d, d);
  ss.R = MatrixXd::Zero(d, q);
  ss.c = VectorXd::Zero(d);
  ss.H = comps.Sigma_eps;
  ss.Q = MatrixXd::Zero(q, q);
  ss.Q.block(0, 0, m, m) = comps.Sigma_u;
  ss.Q.block(m, m, m, m) = comps.Sigma_v;
  ss.Q.block(2 * m, 2 * m, m, m) = comps.Sigma_w;
  if (spec.cyclical_enabled) {
    ss.Q.block(3 * m, 3 * m, m, m) = comps.Sigma_eta;
    ss.Q.block(4 * m, 4 * m, m, m) = comps.Sigma_eta_star;
  }

  for (int i = 0; i < m; ++i) {
    const int mu = lay.mu(i), de = lay.delta(i), k0 = lay.kappa0(i);
    const int ns = lay.seasonal_states(i);

    ss.Z(i, mu) = 1.0;
    ss.Z(i, k0) = 1.0;

    // local linear trend: mu' = mu + delta, delta' = (1-rho) D + rho delta
    ss.T(mu, mu) = 1.0;
    ss.T(mu, de) = 1.0;
    ss.T(de, de) = comps.rho[i];
    ss.c[de] = (1.0 - comps.rho[i]) * comps.D[i];
    ss.R(mu, i) = 1.0;
    ss.R(de, m + i) = 1.0;

    // seasonal sum block: kappa' = -(kappa_t + ... + kappa_{t-s+2}) + w
    for (int j = 0; j < ns; ++j) ss.T(k0, k0 + j) = -1.0;
    for (int j = 1; j < ns; ++j) ss.T(k0 + j, k0 + j - 1) = 1.0;
    ss.R(k0, 2 * m + i) = 1.0;

    if (spec.cyclical_enabled) {
      const int om = lay.omega(i), os = lay.omega_star(i);
      const double cz = comps.zeta[i] * std::cos(comps.lambda[i]);
      const double sz = comps.zeta[i] * std::sin(comps.lambda[i]);
      ss.Z(i, om) = 1.0;
      ss.T(om, om) = cz;
      ss.T(om, os) = sz;
      ss.T(os, om) = -sz;
      ss.T(os, os) = cz;
      ss.R(om, 3 * m + i) = 1.0;
      ss.R(os, 4 * m + i) = 1.0;
    }
  }

  // diffuse-by-proxy initialization
  ss.a1 = VectorXd::Zero(d);
  ss.P1 = 1e6 * MatrixXd::Identity(d, d);
  ss.validate();
  return ss;
}

namespace {

bool llt_ok(const Eigen::LLT<MatrixXd>& llt) {
  return llt.info() == Eigen::Success && llt.matrixLLT().diagonal().minCoeff() > 0.0;
}

// factor F, with one jitter retry before giving up
Eigen::LLT<MatrixXd> factor_innovation(const MatrixXd& F) {
  Eigen::LLT<MatrixXd> llt(F);
  if (llt_ok(llt)) return llt;
  const double jitter = 1e-10 * F.trace();
  const MatrixXd Fj = F + jitter * MatrixXd::Identity(F.rows(), F.cols());
  llt.compute(Fj);
  if (!(jitter > 0.0) || !llt_ok(llt))
    raise(Errc::singular_innovation_covariance, "innovation covariance not positive definite");
  return llt;
}

constexpr double kLog2Pi = 1.8378770664093454836;

}  // namespace

KalmanOutput kalman_filter(const StateSpaceModel& model, const MatrixXd& y) {
  model.validate();
  const Eigen::Index n = y.rows();
  const Eigen::Index d = model.state_dim();
  const Eigen::Index p = model.obs_dim();
  if (y.cols() != p) raise(Errc::dimension_mismatch, "observation width does not match model");

  KalmanOutput out;
  out.a_pred.resize(n, d);
  out.a_filt.resize(n, d);
  out.innovations.resize(n, p);
  out.P_pred.resize(static_cast<std::size_t>(n));
  out.P_filt.resize(static_cast<std::size_t>(n));
  out.Finv.resize(static_cast<std::size_t>(n));
  out.K.resize(static_cast<std::size_t>(n));

  const MatrixXd RQR = model.R * model.Q * model.R.transpose();
  VectorXd a = model.a1;
  MatrixXd P = model.P1;

  for (Eigen::Index t = 0; t < n; ++t) {
    out.a_pred.row(t) = a.transpose();
    out.P_pred[static_cast<std::size_t>(t)] = P;

    const VectorXd v = y.row(t).transpose() - model.Z * a;
    MatrixXd F = model.Z * P * model.Z.transpose() + model.H;
    symmetrize(F);
    const auto llt = factor_innovation(F);
    const MatrixXd Finv = llt.solve(MatrixXd::Identity(p, p));

    double logdet = 0.0;
    for (Eigen::Index i = 0; i < p; ++i) logdet += 2.0 * std::log(llt.matrixL()(i, i));
    out.loglik += -0.5 * (p * kLog2Pi + logdet + v.dot(Finv * v));

    const MatrixXd PZt = P * model.Z.transpose();
    const MatrixXd K = model.T * PZt * Finv;

    out.innovations.row(t) = v.transpose();
    out.Finv[static_cast<std::size_t>(t)] = Finv;
    out.K[static_cast<std::size_t>(t)] = K;

    out.a_filt.row(t) = (a + PZt * (Finv * v)).transpose();
    MatrixXd Pf = P - PZt * Finv * PZt.transpose();
    symmetrize(Pf);
    out.P_filt[static_cast<std::size_t>(t)] = Pf;

    a = model.c + model.T * a + K * v;
    P = model.T * P * (model.T - K * model.Z).transpose() + RQR;
    symmetrize(P);
  }
  return out;
}

MatrixXd kalman_smoother(const StateSpaceModel& model, const KalmanOutput& filt) {
  const Eigen::Index n = filt.a_pred.rows();
  const Eigen::Index d = model.state_dim();
  MatrixXd alpha_hat(n, d);
  VectorXd r = VectorXd::Zero(d);
  for (Eigen::Index t = n - 1; t >= 0; --t) {
    const auto& Finv = filt.Finv[static_cast<std::size_t>(t)];
    const auto& K = filt.K[static_cast<std::size_t>(t)];
    const VectorXd v = filt.innovations.row(t).transpose();
    const MatrixXd L = model.T - K * model.Z;
    r = model.Z.transpose() * (Finv * v) + L.transpose() * r;
    alpha_hat.row(t) =
        (filt.a_pred.row(t).transpose() + filt.P_pred[static_cast<std::size_t>(t)] * r)
            .transpose();
  }
  return alpha_hat;
}

SmootherOutput kalman_smoother_cov(const StateSpaceModel& model, const KalmanOutput& filt) {
  const Eigen::Index n = filt.a_pred.rows();
  const Eigen::Index d = model.state_dim();
  SmootherOutput out;
  out.alpha_hat.resize(n, d);
  out.V.resize(static_cast<std::size_t>(n));
  VectorXd r = VectorXd::Zero(d);
  MatrixXd N = MatrixXd::Zero(d, d);
  for (Eigen::Index t = n - 1; t >= 0; --t) {
    const auto& Finv = filt.Finv[static_cast<std::size_t>(t)];
    const auto& K = filt.K[static_cast<std::size_t>(t)];
    const auto& P = filt.P_pred[static_cast<std::size_t>(t)];
    const VectorXd v = filt.innovations.row(t).transpose();
    const MatrixXd L = model.T - K * model.Z;
    r = model.Z.transpose() * (Finv * v) + L.transpose() * r;
    N = model.Z.transpose() * Finv * model.Z + L.transpose() * N * L;
    out.alpha_hat.row(t) = (filt.a_pred.row(t).transpose() + P * r).transpose();
    MatrixXd V = P - P * N * P;
    out.max_asymmetry = std::max(out.max_asymmetry, (V - V.transpose()).cwiseAbs().maxCoeff());
    symmetrize(V);
    out.V[static_cast<std::size_t>(t)] = V;
  }
  return out;
}

MatrixXd simulation_smoother(const StateSpaceModel& model, const MatrixXd& y, Rng& rng) {
  model.validate();
  const Eigen::Index n = y.rows();
  const Eigen::Index d = model.state_dim();
  const Eigen::Index p = model.obs_dim();
  const Eigen::Index q = model.shock_dim();

  // unconditional draw (alpha+, y+) from the prior structure
  const MatrixXd P1_sqrt = psd_sqrt(model.P1);
  const MatrixXd Q_sqrt = psd_sqrt(model.Q);
  const MatrixXd H_sqrt = psd_sqrt(model.H);

  MatrixXd alpha_plus(n, d), y_plus(n, p);
  VectorXd a = model.a1 + P1_sqrt * rng.normal_vec(d);
  for (Eigen::Index t = 0; t < n; ++t) {
    alpha_plus.row(t) = a.transpose();
    y_plus.row(t) = (model.Z * a + H_sqrt * rng.normal_vec(p)).transpose();
    a = model.c + model.T * a + model.R * (Q_sqrt * rng.normal_vec(q));
  }

  const MatrixXd alpha_hat = kalman_smoother(model, kalman_filter(model, y));
  const MatrixXd alpha_hat_plus = kalman_smoother(model, kalman_filter(model, y_plus));
  return alpha_hat + alpha_plus - alpha_hat_plus;
}

}  // namespace shmbs

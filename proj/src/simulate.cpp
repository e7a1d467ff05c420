#include "shmbs/simulate.hpp"

#include <cmath>

namespace shmbs {

SimConfig SimConfig::table_defaults() {
  SimConfig c;
  c.phi.resize(3, 3);
  c.phi << 0.6, -0.8, 0.5,
           0.8, -0.6, 0.5,
           0.5,  0.3, -0.7;
  c.sigma2_driver = VectorXd::Constant(3, 0.5);
  c.beta0.resize(3, 3);
  c.beta0 << 2.0, 0.0, 1.5,
             2.0, 0.0, 1.5,
             2.0, 0.0, 1.5;
  c.beta1.resize(3, 3);
  c.beta1 << -1.5, 4.0, 0.0,
             -1.5, 4.0, 0.0,
             -1.5, 4.0, 0.0;
  c.rho_true = VectorXd::Zero(3);
  c.rho_true << 0.6, 0.5, 0.5;
  c.d_true = VectorXd::Zero(3);
  c.s_true = {4, 4, 4};
  return c;
}

void SimConfig::validate() const {
  if (phi.rows() != m || phi.cols() != 3)
    raise(Errc::dimension_mismatch, "phi must be m x 3");
  if (sigma2_driver.size() != m || beta0.rows() != m || beta1.rows() != m ||
      rho_true.size() != m || d_true.size() != m || static_cast<int>(s_true.size()) != m)
    raise(Errc::dimension_mismatch, "config vectors must have one entry per series");
  for (Eigen::Index i = 0; i < m; ++i) {
    if (!(sigma2_driver[i] > 0.0)) raise(Errc::dimension_mismatch, "driver variances must be positive");
    if (!ar3_is_stationary(phi.row(i).transpose()))
      raise(Errc::non_stationary_config,
            "AR(3) coefficients for series " + std::to_string(i + 1) + " are not stationary");
  }
  for (double s2 : {sigma2_u, sigma2_v, sigma2_w, sigma2_eps})
    if (!(s2 >= 0.0)) raise(Errc::dimension_mismatch, "component variances must be non-negative");
  if (!(q_L > 0.0 && q_L < q_U && q_U < 1.0))
    raise(Errc::dimension_mismatch, "need 0 < q_L < q_U < 1");
}

namespace {

Eigen::Matrix3d companion(const VectorXd& phi) {
  Eigen::Matrix3d A = Eigen::Matrix3d::Zero();
  A(0, 0) = phi[0];
  A(0, 1) = phi[1];
  A(0, 2) = phi[2];
  A(1, 0) = 1.0;
  A(2, 1) = 1.0;
  return A;
}

}  // namespace

bool ar3_is_stationary(const VectorXd& phi) {
  const auto ev = companion(phi).eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (std::abs(ev[i]) >= 1.0 - 1e-12) return false;
  return true;
}

double ar3_stationary_variance(const VectorXd& phi, double sigma2) {
  if (!ar3_is_stationary(phi)) raise(Errc::non_stationary_config, "non-stationary AR(3)");
  // vec(V) = (I - A kron A)^{-1} vec(B)
  const Eigen::Matrix3d A = companion(phi);
  Eigen::Matrix3d B = Eigen::Matrix3d::Zero();
  B(0, 0) = sigma2;
  MatrixXd lhs = MatrixXd::Identity(9, 9);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l)
          lhs(i * 3 + k, j * 3 + l) -= A(i, j) * A(k, l);
  VectorXd vecB(9);
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 3; ++i) vecB[j * 3 + i] = B(i, j);
  const VectorXd vecV = lhs.colPivHouseholderQr().solve(vecB);
  return vecV[0];
}

MatrixXd gen_ar3(const SimConfig& config, Rng& rng) {
  config.validate();
  const int total = config.burn_in + config.n;
  MatrixXd x = MatrixXd::Zero(total, config.m);
  for (int i = 0; i < config.m; ++i) {
    const double sd = std::sqrt(config.sigma2_driver[i]);
    double x1 = 0.0, x2 = 0.0, x3 = 0.0;  // zero pre-sample state
    for (int t = 0; t < total; ++t) {
      const double v = config.phi(i, 0) * x1 + config.phi(i, 1) * x2 + config.phi(i, 2) * x3 +
                       sd * rng.normal();
      x(t, i) = v;
      x3 = x2;
      x2 = x1;
      x1 = v;
    }
  }
  return x.bottomRows(config.n);
}

RegimeSimPath gen_regimes(const MatrixXd& x, double q_L, double q_U, double k_star, int init) {
  if (!(q_L > 0.0 && q_L <= q_U && q_U < 1.0))
    raise(Errc::dimension_mismatch, "need 0 < q_L <= q_U < 1");
  const Eigen::Index n = x.rows();
  const Eigen::Index m = x.cols();
  RegimeSimPath out;
  out.per_asset.resize(n, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const VectorXd sorted = sorted_column(x, static_cast<int>(i));
    const std::span<const double> s(sorted.data(), static_cast<std::size_t>(sorted.size()));
    const double tau_L = quantile_sorted(s, q_L);
    const double tau_U = quantile_sorted(s, q_U);
    out.per_asset.col(i) = har_indicator(x.col(i), tau_L, tau_U, init);
  }
  out.global = aggregate(out.per_asset, k_star, init);
  return out;
}

MatrixXd gen_observations(const SimConfig& config, const MatrixXd& x, const ArrayXi& regimes,
                          Rng& rng, LatentTruth* truth) {
  config.validate();
  const int n = static_cast<int>(x.rows());
  const int m = config.m;
  if (x.cols() != m) raise(Errc::dimension_mismatch, "driver width mismatch");
  if (regimes.size() != n) raise(Errc::misaligned_index, "regime path length mismatch");
  const int p = 3;

  const double sd_u = std::sqrt(config.sigma2_u);
  const double sd_v = std::sqrt(config.sigma2_v);
  const double sd_w = std::sqrt(config.sigma2_w);
  const double sd_e = std::sqrt(config.sigma2_eps);

  MatrixXd mu = MatrixXd::Zero(n, m), delta = MatrixXd::Zero(n, m), kap = MatrixXd::Zero(n, m);
  MatrixXd xi = MatrixXd::Zero(n, m);
  MatrixXd y(n, m);
  MatrixXd nu = MatrixXd::Zero(std::max(n - 1, 0), m), nv = nu, nw = nu;
  MatrixXd neps = MatrixXd::Zero(n, m);

  // per-series seasonal lag buffers (s-2 past values), zero initial block
  std::vector<std::vector<double>> lags(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    const int s = config.s_true[static_cast<std::size_t>(i)];
    lags[static_cast<std::size_t>(i)].assign(s >= 2 ? static_cast<std::size_t>(s - 2) : 0, 0.0);
  }

  for (int t = 0; t < n; ++t) {
    for (int i = 0; i < m; ++i) {
      if (t >= p) {
        const auto& b = regimes[t] == 1 ? config.beta1 : config.beta0;
        xi(t, i) = b(i, 0) * x(t - 1, i) + b(i, 1) * x(t - 2, i) + b(i, 2) * x(t - 3, i);
      }
      neps(t, i) = sd_e * rng.normal();
      y(t, i) = mu(t, i) + kap(t, i) + xi(t, i) + neps(t, i);
    }
    if (t + 1 < n) {
      for (int i = 0; i < m; ++i) {
        nu(t, i) = sd_u * rng.normal();
        nv(t, i) = sd_v * rng.normal();
        nw(t, i) = sd_w * rng.normal();
        mu(t + 1, i) = mu(t, i) + delta(t, i) + nu(t, i);
        delta(t + 1, i) = config.d_true[i] +
                          config.rho_true[i] * (delta(t, i) - config.d_true[i]) + nv(t, i);
        auto& lag = lags[static_cast<std::size_t>(i)];
        double ssum = kap(t, i);
        for (double lv : lag) ssum += lv;
        const double knext = -ssum + nw(t, i);
        // current kappa becomes the newest lag
        for (std::size_t j = lag.size(); j > 1; --j) lag[j - 1] = lag[j - 2];
        if (!lag.empty()) lag[0] = kap(t, i);
        kap(t + 1, i) = knext;
      }
    }
  }

  if (truth) {
    truth->mu = mu;
    truth->delta = delta;
    truth->kappa = kap;
    truth->xi = xi;
    truth->u = nu;
    truth->v = nv;
    truth->w = nw;
    truth->eps = neps;
  }
  return y;
}

}  // namespace shmbs

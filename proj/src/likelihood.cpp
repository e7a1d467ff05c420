#include "shmbs/likelihood.hpp"

#include <cmath>

namespace shmbs {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;
constexpr Eigen::Index kChunk = 256;

Eigen::LLT<MatrixXd> factor_sigma(const MatrixXd& Sigma_eps) {
  Eigen::LLT<MatrixXd> llt(Sigma_eps);
  if (llt.info() != Eigen::Success || llt.matrixLLT().diagonal().minCoeff() <= 0.0)
    raise(Errc::singular_sigma_eps, "observation covariance not positive definite");
  return llt;
}

double logdet_from_llt(const Eigen::LLT<MatrixXd>& llt) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < llt.matrixLLT().rows(); ++i)
    s += 2.0 * std::log(llt.matrixLLT()(i, i));
  return s;
}

}  // namespace

RegressionDesign RegressionDesign::build(const MatrixXd& driver, int p, bool cross,
                                         bool regime_split) {
  if (p < 1) raise(Errc::config_error, "lag order must be at least 1");
  if (driver.rows() <= p) raise(Errc::insufficient_history, "driver shorter than lag order");
  RegressionDesign d;
  d.n = static_cast<int>(driver.rows());
  d.p = p;
  d.m = static_cast<int>(driver.cols());
  d.cross = cross;
  d.regime_split = regime_split;

  const int kb = d.k_base();
  d.base.resize(d.n_eff(), d.m * kb);
  for (int i = 0; i < d.m; ++i) {
    for (int l = 1; l <= p; ++l) {
      if (cross) {
        for (int j = 0; j < d.m; ++j)
          d.base.col(i * kb + (l - 1) * d.m + j) =
              driver.col(j).segment(p - l, d.n_eff());
      } else {
        d.base.col(i * kb + (l - 1)) = driver.col(i).segment(p - l, d.n_eff());
      }
    }
  }

  const int regimes = regime_split ? 2 : 1;
  for (int i = 0; i < d.m; ++i)
    for (int j = 0; j < regimes; ++j)
      for (int l = 1; l <= p; ++l) {
        if (cross) {
          for (int s = 0; s < d.m; ++s)
            d.names.push_back("beta_" + std::to_string(j) + "_" + std::to_string(i + 1) + "_l" +
                              std::to_string(l) + "s" + std::to_string(s + 1));
        } else {
          d.names.push_back("beta_" + std::to_string(j) + "_" + std::to_string(i + 1) + "_" +
                            std::to_string(l));
        }
      }
  return d;
}

MatrixXd RegressionDesign::stacked(const ArrayXi& regime) const {
  if (regime.size() != n) raise(Errc::misaligned_index, "regime path length mismatch");
  const int ne = n_eff();
  const int kb = k_base();
  MatrixXd Z = MatrixXd::Zero(static_cast<Eigen::Index>(ne) * m, K());
  const int regimes = regime_split ? 2 : 1;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < regimes; ++j) {
      for (int b = 0; b < kb; ++b) {
        const int col = i * cols_per_asset() + j * kb + b;
        for (int r = 0; r < ne; ++r) {
          const int rt = regime_split ? regime[p + r] : 0;
          if (rt == j) Z(static_cast<Eigen::Index>(i) * ne + r, col) = base(r, i * kb + b);
        }
      }
    }
  }
  return Z;
}

void RegressionDesign::xi_pair(const VectorXd& beta, MatrixXd& xi0, MatrixXd& xi1) const {
  if (beta.size() != K()) raise(Errc::dimension_mismatch, "beta length mismatch");
  const int ne = n_eff();
  const int kb = k_base();
  xi0.setZero(ne, m);
  xi1.setZero(ne, m);
  for (int i = 0; i < m; ++i) {
    const auto block = base.middleCols(i * kb, kb);
    xi0.col(i) = block * beta.segment(i * cols_per_asset(), kb);
    if (regime_split)
      xi1.col(i) = block * beta.segment(i * cols_per_asset() + kb, kb);
    else
      xi1.col(i) = xi0.col(i);
  }
}

MatrixXd RegressionDesign::xi_full(const VectorXd& beta, const ArrayXi& regime) const {
  if (regime.size() != n) raise(Errc::misaligned_index, "regime path length mismatch");
  MatrixXd xi0, xi1;
  xi_pair(beta, xi0, xi1);
  MatrixXd xi = MatrixXd::Zero(n, m);
  for (int r = 0; r < n_eff(); ++r)
    xi.row(p + r) = (regime[p + r] == 1 ? xi1.row(r) : xi0.row(r));
  return xi;
}

void residual_quadforms(const MatrixXd& resid0, const MatrixXd& resid1,
                        const MatrixXd& Sigma_eps, VectorXd& q0, VectorXd& q1, double& logdet) {
  const auto llt = factor_sigma(Sigma_eps);
  logdet = logdet_from_llt(llt);
  // e' Sigma^{-1} e = || L^{-1} e ||^2
  const MatrixXd w0 = llt.matrixL().solve(resid0.transpose());
  const MatrixXd w1 = llt.matrixL().solve(resid1.transpose());
  q0 = w0.colwise().squaredNorm().transpose();
  q1 = w1.colwise().squaredNorm().transpose();
}

double loglik_from_quadforms(const VectorXd& q0, const VectorXd& q1, const ArrayXi& regime_tail,
                             double logdet, int m) {
  const Eigen::Index ne = q0.size();
  if (regime_tail.size() != ne) raise(Errc::misaligned_index, "regime tail length mismatch");
  const Eigen::Index nchunk = (ne + kChunk - 1) / kChunk;
  VectorXd partial = VectorXd::Zero(nchunk);
#pragma omp parallel for schedule(static)
  for (Eigen::Index ci = 0; ci < nchunk; ++ci) {
    const Eigen::Index lo = ci * kChunk;
    const Eigen::Index hi = std::min(lo + kChunk, ne);
    double s = 0.0;
    for (Eigen::Index t = lo; t < hi; ++t) s += (regime_tail[t] == 1 ? q1[t] : q0[t]);
    partial[ci] = s;
  }
  double quad = 0.0;
  for (Eigen::Index ci = 0; ci < nchunk; ++ci) quad += partial[ci];
  return -0.5 * (static_cast<double>(ne) * (m * kLog2Pi + logdet) + quad);
}

double regime_loglik(const MatrixXd& resid0, const MatrixXd& resid1, const ArrayXi& regime_tail,
                     const MatrixXd& Sigma_eps) {
  VectorXd q0, q1;
  double logdet = 0.0;
  residual_quadforms(resid0, resid1, Sigma_eps, q0, q1, logdet);
  return loglik_from_quadforms(q0, q1, regime_tail, logdet, static_cast<int>(Sigma_eps.rows()));
}

double regime_loglik_serial(const MatrixXd& resid0, const MatrixXd& resid1,
                            const ArrayXi& regime_tail, const MatrixXd& Sigma_eps) {
  const auto llt = factor_sigma(Sigma_eps);
  const double logdet = logdet_from_llt(llt);
  const Eigen::Index ne = resid0.rows();
  const int m = static_cast<int>(Sigma_eps.rows());
  double ll = 0.0;
  for (Eigen::Index t = 0; t < ne; ++t) {
    const VectorXd e =
        (regime_tail[t] == 1 ? resid1.row(t) : resid0.row(t)).transpose();
    const VectorXd w = llt.matrixL().solve(e);
    ll += -0.5 * (m * kLog2Pi + logdet + w.squaredNorm());
  }
  return ll;
}

double log_likelihood(const MatrixXd& y, const MatrixXd& mu, const MatrixXd& kappa,
                      const RegressionDesign& design, const VectorXd& beta,
                      const MatrixXd& Sigma_eps, const ArrayXi& regime_path, bool serial) {
  if (y.rows() != design.n || mu.rows() != design.n || kappa.rows() != design.n)
    raise(Errc::dimension_mismatch, "panel length does not match design");
  const int ne = design.n_eff();
  MatrixXd xi0, xi1;
  design.xi_pair(beta, xi0, xi1);
  const MatrixXd Yeff = (y - mu - kappa).bottomRows(ne);
  const ArrayXi tail = regime_path.tail(ne);
  const MatrixXd r0 = Yeff - xi0;
  const MatrixXd r1 = Yeff - xi1;
  return serial ? regime_loglik_serial(r0, r1, tail, Sigma_eps)
                : regime_loglik(r0, r1, tail, Sigma_eps);
}

}  // namespace shmbs

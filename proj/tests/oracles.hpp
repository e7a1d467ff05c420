// Brute-force reference computations used by tests only. Everything here
// is deliberately independent of the recursions it checks: state paths
// are materialized as one big jointly Gaussian vector and conditioned by
// dense linear algebra.
#pragma once

#include <cmath>

#include "shmbs/statespace.hpp"

namespace oracle {

using shmbs::MatrixXd;
using shmbs::VectorXd;

inline double dense_gaussian_logpdf(const VectorXd& x, const VectorXd& mean,
                                    const MatrixXd& cov) {
  const Eigen::Index k = x.size();
  const Eigen::LLT<MatrixXd> llt(cov);
  const VectorXd z = llt.matrixL().solve(x - mean);
  double logdet = 0.0;
  for (Eigen::Index i = 0; i < k; ++i) logdet += 2.0 * std::log(llt.matrixL()(i, i));
  return -0.5 * (static_cast<double>(k) * std::log(2.0 * M_PI) + logdet + z.squaredNorm());
}

// (alpha_{1:n}, y_{1:n}) as explicit linear maps of the primitive
// Gaussian vector w = (alpha_1 - a1, eta_1.., eps_1..)
struct JointGaussian {
  VectorXd y_mean;      // n*p, time-major
  MatrixXd y_cov;
  VectorXd alpha_mean;  // n*d, time-major
  MatrixXd cross;       // Cov(alpha, y)

  static JointGaussian build(const shmbs::StateSpaceModel& model, int n) {
    const auto d = model.state_dim();
    const auto p = model.obs_dim();
    const auto q = model.shock_dim();
    const Eigen::Index dim_w = d + (n - 1) * q + n * p;

    MatrixXd W = MatrixXd::Zero(dim_w, dim_w);
    W.topLeftCorner(d, d) = model.P1;
    for (int t = 0; t < n - 1; ++t) W.block(d + t * q, d + t * q, q, q) = model.Q;
    const Eigen::Index eps0 = d + (n - 1) * q;
    for (int t = 0; t < n; ++t) W.block(eps0 + t * p, eps0 + t * p, p, p) = model.H;

    // propagate linear maps alpha_t = m_t + S_t w
    std::vector<MatrixXd> S(static_cast<std::size_t>(n));
    std::vector<VectorXd> mvec(static_cast<std::size_t>(n));
    S[0] = MatrixXd::Zero(d, dim_w);
    S[0].topLeftCorner(d, d) = MatrixXd::Identity(d, d);
    mvec[0] = model.a1;
    for (int t = 0; t + 1 < n; ++t) {
      S[static_cast<std::size_t>(t + 1)] = model.T * S[static_cast<std::size_t>(t)];
      S[static_cast<std::size_t>(t + 1)].block(0, d + t * q, d, q) += model.R;
      mvec[static_cast<std::size_t>(t + 1)] = model.c + model.T * mvec[static_cast<std::size_t>(t)];
    }

    MatrixXd G = MatrixXd::Zero(n * p, dim_w);
    MatrixXd A = MatrixXd::Zero(n * d, dim_w);
    JointGaussian out;
    out.y_mean.resize(n * p);
    out.alpha_mean.resize(n * d);
    for (int t = 0; t < n; ++t) {
      G.middleRows(t * p, p) = model.Z * S[static_cast<std::size_t>(t)];
      G.block(t * p, eps0 + t * p, p, p) += MatrixXd::Identity(p, p);
      A.middleRows(t * d, d) = S[static_cast<std::size_t>(t)];
      out.y_mean.segment(t * p, p) = model.Z * mvec[static_cast<std::size_t>(t)];
      out.alpha_mean.segment(t * d, d) = mvec[static_cast<std::size_t>(t)];
    }
    out.y_cov = G * W * G.transpose();
    out.cross = A * W * G.transpose();
    return out;
  }

  double loglik(const MatrixXd& y) const {
    return dense_gaussian_logpdf(stack(y), y_mean, y_cov);
  }

  // E[alpha | y] via partitioned-Gaussian conditioning, returned n x d
  MatrixXd conditional_mean(const MatrixXd& y, int d) const {
    const VectorXd post =
        alpha_mean + cross * y_cov.llt().solve(stack(y) - y_mean);
    const int n = static_cast<int>(y.rows());
    MatrixXd out(n, d);
    for (int t = 0; t < n; ++t) out.row(t) = post.segment(t * d, d).transpose();
    return out;
  }

  static VectorXd stack(const MatrixXd& y) {  // time-major
    VectorXd v(y.size());
    for (Eigen::Index t = 0; t < y.rows(); ++t)
      v.segment(t * y.cols(), y.cols()) = y.row(t).transpose();
    return v;
  }
};

// stationary variance of an AR(3) process from the Yule-Walker system
inline double yule_walker_ar3_variance(const VectorXd& phi, double sigma2) {
  // unknowns (g0, g1, g2, g3)
  Eigen::Matrix4d A = Eigen::Matrix4d::Zero();
  Eigen::Vector4d b = Eigen::Vector4d::Zero();
  const double p1 = phi[0], p2 = phi[1], p3 = phi[2];
  // g0 = p1 g1 + p2 g2 + p3 g3 + sigma2
  A(0, 0) = 1;  A(0, 1) = -p1; A(0, 2) = -p2; A(0, 3) = -p3; b[0] = sigma2;
  // g1 = p1 g0 + p2 g1 + p3 g2
  A(1, 0) = -p1; A(1, 1) = 1 - p2; A(1, 2) = -p3; b[1] = 0;
  // g2 = p1 g1 + p2 g0 + p3 g1
  A(2, 0) = -p2; A(2, 1) = -p1 - p3; A(2, 2) = 1; b[2] = 0;
  // g3 = p1 g2 + p2 g1 + p3 g0
  A(3, 0) = -p3; A(3, 1) = -p2; A(3, 2) = -p1; A(3, 3) = 1; b[3] = 0;
  const Eigen::Vector4d g = A.colPivHouseholderQr().solve(b);
  return g[0];
}

}  // namespace oracle

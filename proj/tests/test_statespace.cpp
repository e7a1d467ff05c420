#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "shmbs/rng.hpp"
#include "shmbs/statespace.hpp"

using namespace shmbs;

namespace {

MatrixXd random_pd(int k, Rng& rng, double scale = 1.0) {
  MatrixXd A(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) A(i, j) = rng.normal();
  return scale * (A * A.transpose() + 0.5 * static_cast<double>(k) * MatrixXd::Identity(k, k));
}

StateSpaceModel random_model(int d, int p, Rng& rng) {
  StateSpaceModel ss;
  ss.Z.resize(p, d);
  ss.T.resize(d, d);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < d; ++j) ss.Z(i, j) = rng.normal();
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) ss.T(i, j) = 0.5 * rng.normal() / std::sqrt(d);
  ss.R = MatrixXd::Identity(d, d);
  ss.H = random_pd(p, rng, 0.5);
  ss.Q = random_pd(d, rng, 0.3);
  ss.P1 = random_pd(d, rng, 1.0);
  ss.a1 = rng.normal_vec(d);
  ss.c = 0.1 * rng.normal_vec(d);
  return ss;
}

MatrixXd random_panel(int n, int p, Rng& rng) {
  MatrixXd y(n, p);
  for (int t = 0; t < n; ++t)
    for (int i = 0; i < p; ++i) y(t, i) = rng.normal();
  return y;
}

ModelSpec make_spec(int m, int s, bool cyclical = false) {
  ModelSpec spec;
  spec.m = m;
  spec.seasonal_periods.assign(static_cast<std::size_t>(m), s);
  spec.cyclical_enabled = cyclical;
  spec.finalize();
  return spec;
}

}  // namespace

TEST_CASE("assemble dimensions follow (m, s, cyclical)") {
  CHECK(assemble(make_spec(1, 4), MbsComponents::defaults(make_spec(1, 4))).state_dim() == 5);
  // three series, four seasons each
  CHECK(assemble(make_spec(3, 4), MbsComponents::defaults(make_spec(3, 4))).state_dim() == 15);
  CHECK(assemble(make_spec(1, 4, true), MbsComponents::defaults(make_spec(1, 4, true)))
            .state_dim() == 7);
  CHECK(assemble(make_spec(2, 2), MbsComponents::defaults(make_spec(2, 2))).state_dim() == 6);

  // dimensions are a pure function of the spec
  for (int m = 1; m <= 3; ++m)
    for (int s = 2; s <= 6; ++s) {
      const ModelSpec spec = make_spec(m, s);
      CHECK(assemble(spec, MbsComponents::defaults(spec)).state_dim() == m * (2 + s - 1));
    }
}

TEST_CASE("assemble rejects mismatched component dimensions") {
  const ModelSpec spec = make_spec(2, 4);
  MbsComponents comps = MbsComponents::defaults(make_spec(3, 4));
  CHECK_THROWS_WITH_AS(assemble(spec, comps), doctest::Contains("DimensionMismatch"), Error);
}

TEST_CASE("filter log-likelihood matches the joint-Gaussian oracle: scalar random walk") {
  StateSpaceModel ss;
  ss.Z = MatrixXd::Constant(1, 1, 1.0);
  ss.T = MatrixXd::Constant(1, 1, 1.0);
  ss.R = MatrixXd::Constant(1, 1, 1.0);
  ss.H = MatrixXd::Constant(1, 1, 0.7);
  ss.Q = MatrixXd::Constant(1, 1, 0.3);
  ss.P1 = MatrixXd::Constant(1, 1, 2.0);
  ss.a1 = VectorXd::Constant(1, 0.5);
  ss.c = VectorXd::Zero(1);

  MatrixXd y(3, 1);
  y << 0.4, 1.1, 0.2;
  const double ll = kalman_filter(ss, y).loglik;
  const double want = oracle::JointGaussian::build(ss, 3).loglik(y);
  CHECK(ll == doctest::Approx(want).epsilon(1e-10));
}

TEST_CASE("filter log-likelihood matches the oracle on random models") {
  Rng rng(2024);
  for (int rep = 0; rep < 20; ++rep) {
    const int p = 1 + static_cast<int>(rng.raw() % 3);
    const int d = p + static_cast<int>(rng.raw() % 3);
    const int n = 2 + static_cast<int>(rng.raw() % 4);  // n <= 5
    const StateSpaceModel ss = random_model(d, p, rng);
    const MatrixXd y = random_panel(n, p, rng);
    const double ll = kalman_filter(ss, y).loglik;
    const double want = oracle::JointGaussian::build(ss, n).loglik(y);
    CHECK(ll == doctest::Approx(want).epsilon(1e-8));
  }
}

TEST_CASE("smoothed means match partitioned-Gaussian conditioning") {
  Rng rng(7);
  for (int rep = 0; rep < 10; ++rep) {
    const int p = 1 + static_cast<int>(rng.raw() % 2);
    const int d = p + static_cast<int>(rng.raw() % 2);
    const int n = 3 + static_cast<int>(rng.raw() % 3);
    const StateSpaceModel ss = random_model(d, p, rng);
    const MatrixXd y = random_panel(n, p, rng);
    const MatrixXd smoothed = kalman_smoother(ss, kalman_filter(ss, y));
    const MatrixXd want = oracle::JointGaussian::build(ss, n).conditional_mean(y, d);
    CHECK((smoothed - want).cwiseAbs().maxCoeff() < 1e-8 * (1.0 + want.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("n=1: smoothed equals filtered") {
  Rng rng(3);
  const StateSpaceModel ss = random_model(2, 1, rng);
  const MatrixXd y = random_panel(1, 1, rng);
  const KalmanOutput filt = kalman_filter(ss, y);
  const MatrixXd smoothed = kalman_smoother(ss, filt);
  CHECK((smoothed.row(0) - filt.a_filt.row(0)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("Q=0: smoothed trend is the ridge/GLS line through the observations") {
  // local linear trend with no state noise: mu_t = mu_1 + (t-1) delta_1
  StateSpaceModel ss;
  ss.Z.resize(1, 2);
  ss.Z << 1.0, 0.0;
  ss.T.resize(2, 2);
  ss.T << 1.0, 1.0, 0.0, 1.0;
  ss.R = MatrixXd::Zero(2, 1);
  ss.Q = MatrixXd::Zero(1, 1);
  const double h = 0.8;
  ss.H = MatrixXd::Constant(1, 1, h);
  ss.P1.resize(2, 2);
  ss.P1 << 3.0, 0.2, 0.2, 1.5;
  ss.a1.resize(2);
  ss.a1 << 0.3, -0.1;
  ss.c = VectorXd::Zero(2);

  const int n = 8;
  MatrixXd y(n, 1);
  y << 0.1, 0.5, 0.4, 1.0, 1.1, 1.6, 1.4, 2.1;

  // closed-form posterior of (mu_1, delta_1) under the Gaussian prior
  MatrixXd X(n, 2);
  for (int t = 0; t < n; ++t) {
    X(t, 0) = 1.0;
    X(t, 1) = t;
  }
  const MatrixXd P1inv = ss.P1.inverse();
  const MatrixXd post_prec = X.transpose() * X / h + P1inv;
  const VectorXd post_mean =
      post_prec.ldlt().solve(X.transpose() * y / h + P1inv * ss.a1);

  const MatrixXd smoothed = kalman_smoother(ss, kalman_filter(ss, y));
  for (int t = 0; t < n; ++t) {
    CHECK(smoothed(t, 0) ==
          doctest::Approx(post_mean[0] + post_mean[1] * t).epsilon(1e-9));
    CHECK(smoothed(t, 1) == doctest::Approx(post_mean[1]).epsilon(1e-9));
  }
}

TEST_CASE("zero innovation covariance is rejected") {
  StateSpaceModel ss;
  ss.Z = MatrixXd::Constant(1, 1, 1.0);
  ss.T = MatrixXd::Constant(1, 1, 1.0);
  ss.R = MatrixXd::Constant(1, 1, 1.0);
  ss.H = MatrixXd::Zero(1, 1);
  ss.Q = MatrixXd::Zero(1, 1);
  ss.P1 = MatrixXd::Zero(1, 1);
  ss.a1 = VectorXd::Zero(1);
  ss.c = VectorXd::Zero(1);
  const MatrixXd y = MatrixXd::Zero(3, 1);
  CHECK_THROWS_WITH_AS(kalman_filter(ss, y),
                       doctest::Contains("SingularInnovationCovariance"), Error);
}

TEST_CASE("smoothed covariances stay symmetric PSD with small pre-symmetrization drift") {
  Rng rng(99);
  const StateSpaceModel ss = random_model(4, 2, rng);
  const MatrixXd y = random_panel(40, 2, rng);
  const SmootherOutput out = kalman_smoother_cov(ss, kalman_filter(ss, y));
  CHECK(out.max_asymmetry < 1e-8);
  for (const auto& V : out.V) {
    CHECK((V - V.transpose()).cwiseAbs().maxCoeff() == 0.0);
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(V);
    CHECK(es.eigenvalues().minCoeff() > -1e-8);
  }
}

TEST_CASE("simulation smoother: deterministic when Q=0 and P1=0") {
  StateSpaceModel ss;
  ss.Z = MatrixXd::Constant(1, 2, 0.0);
  ss.Z(0, 0) = 1.0;
  ss.T.resize(2, 2);
  ss.T << 1.0, 1.0, 0.0, 1.0;
  ss.R = MatrixXd::Zero(2, 1);
  ss.Q = MatrixXd::Zero(1, 1);
  ss.H = MatrixXd::Constant(1, 1, 1.0);
  ss.P1 = MatrixXd::Zero(2, 2);
  ss.a1.resize(2);
  ss.a1 << 1.0, 0.5;
  ss.c = VectorXd::Zero(2);

  Rng rng(5);
  const MatrixXd y = random_panel(6, 1, rng);
  const MatrixXd draw = simulation_smoother(ss, y, rng);
  for (int t = 0; t < 6; ++t) {
    CHECK(draw(t, 0) == doctest::Approx(1.0 + 0.5 * t).epsilon(1e-12));
    CHECK(draw(t, 1) == doctest::Approx(0.5).epsilon(1e-12));
  }
}

TEST_CASE("simulation smoother: posterior mean calibration on a scalar model") {
  StateSpaceModel ss;
  ss.Z = MatrixXd::Constant(1, 1, 1.0);
  ss.T = MatrixXd::Constant(1, 1, 0.9);
  ss.R = MatrixXd::Constant(1, 1, 1.0);
  ss.H = MatrixXd::Constant(1, 1, 0.5);
  ss.Q = MatrixXd::Constant(1, 1, 0.4);
  ss.P1 = MatrixXd::Constant(1, 1, 1.0);
  ss.a1 = VectorXd::Zero(1);
  ss.c = VectorXd::Zero(1);

  MatrixXd y(3, 1);
  y << 0.9, -0.3, 0.6;
  const MatrixXd want = oracle::JointGaussian::build(ss, 3).conditional_mean(y, 1);

  Rng rng(17);
  const int ndraw = 5000;
  MatrixXd sum = MatrixXd::Zero(3, 1), sumsq = MatrixXd::Zero(3, 1);
  for (int k = 0; k < ndraw; ++k) {
    const MatrixXd d = simulation_smoother(ss, y, rng);
    sum += d;
    sumsq += d.cwiseProduct(d);
  }
  const MatrixXd mean = sum / ndraw;
  for (int t = 0; t < 3; ++t) {
    const double var = sumsq(t, 0) / ndraw - mean(t, 0) * mean(t, 0);
    const double se = std::sqrt(var / ndraw);
    CHECK(std::abs(mean(t, 0) - want(t, 0)) < 3.0 * se);
  }
}

TEST_CASE("simulation smoother: draws approach the prior when H is huge") {
  StateSpaceModel ss;
  ss.Z = MatrixXd::Constant(1, 1, 1.0);
  ss.T = MatrixXd::Constant(1, 1, 0.7);
  ss.R = MatrixXd::Constant(1, 1, 1.0);
  ss.H = MatrixXd::Constant(1, 1, 1e8);  // data carry almost no information
  ss.Q = MatrixXd::Constant(1, 1, 0.5);
  ss.P1 = MatrixXd::Constant(1, 1, 1.0);
  ss.a1 = VectorXd::Constant(1, 0.2);
  ss.c = VectorXd::Zero(1);

  const int n = 4;
  // analytic prior variance of alpha_t: V_{t+1} = T^2 V_t + Q
  VectorXd prior_var(n), prior_mean(n);
  prior_var[0] = 1.0;
  prior_mean[0] = 0.2;
  for (int t = 1; t < n; ++t) {
    prior_var[t] = 0.7 * 0.7 * prior_var[t - 1] + 0.5;
    prior_mean[t] = 0.7 * prior_mean[t - 1];
  }

  Rng rng(23);
  const MatrixXd y = MatrixXd::Zero(n, 1);
  const int ndraw = 2000;
  MatrixXd sum = MatrixXd::Zero(n, 1), sumsq = MatrixXd::Zero(n, 1);
  for (int k = 0; k < ndraw; ++k) {
    const MatrixXd d = simulation_smoother(ss, y, rng);
    sum += d;
    sumsq += d.cwiseProduct(d);
  }
  for (int t = 0; t < n; ++t) {
    const double mean = sum(t, 0) / ndraw;
    const double var = sumsq(t, 0) / ndraw - mean * mean;
    const double se_mean = std::sqrt(prior_var[t] / ndraw);
    // variance of a sample variance estimate ~ 2 var^2 / n
    const double se_var = prior_var[t] * std::sqrt(2.0 / ndraw);
    CHECK(std::abs(mean - prior_mean[t]) < 3.0 * se_mean);
    CHECK(std::abs(var - prior_var[t]) < 3.0 * se_var);
  }
}

TEST_CASE("simulation smoother is deterministic given the seed") {
  const ModelSpec spec = make_spec(2, 4);
  const StateSpaceModel ss = assemble(spec, MbsComponents::defaults(spec));
  Rng rng_a(77), rng_b(77);
  MatrixXd y(10, 2);
  Rng data_rng(1);
  for (int t = 0; t < 10; ++t)
    for (int i = 0; i < 2; ++i) y(t, i) = data_rng.normal();
  const MatrixXd d1 = simulation_smoother(ss, y, rng_a);
  const MatrixXd d2 = simulation_smoother(ss, y, rng_b);
  CHECK((d1 - d2).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("assembled structural model: deterministic propagation with zero noise") {
  // H=0 would break the filter; this checks the transition structure
  // directly instead: kappa states rotate through the seasonal sum
  const ModelSpec spec = make_spec(1, 4);
  MbsComponents comps = MbsComponents::defaults(spec);
  comps.D = VectorXd::Constant(1, 0.25);
  comps.rho = VectorXd::Constant(1, 0.5);
  const StateSpaceModel ss = assemble(spec, comps);

  VectorXd a(5);
  a << 1.0, 0.5, 0.3, -0.2, 0.1;  // mu, delta, kappa_t, kappa_{t-1}, kappa_{t-2}
  const VectorXd next = ss.c + ss.T * a;
  CHECK(next[0] == doctest::Approx(1.5));                       // mu + delta
  CHECK(next[1] == doctest::Approx(0.25 * 0.5 + 0.5 * 0.5));    // (1-rho)D + rho delta
  CHECK(next[2] == doctest::Approx(-(0.3 - 0.2 + 0.1)));        // seasonal sum
  CHECK(next[3] == doctest::Approx(0.3));
  CHECK(next[4] == doctest::Approx(-0.2));
}

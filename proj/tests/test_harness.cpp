#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "shmbs/harness.hpp"
#include "shmbs/simulate.hpp"

using namespace shmbs;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Fixture {
  ModelSpec spec;
  MultiSeries y;
  MatrixXd driver;
  SimConfig sim;
  ArrayXi regimes;
};

Fixture make_fixture(int n, int n_iter = 40, int burn = 15, std::uint64_t seed = 9) {
  Fixture f;
  f.spec.m = 2;
  f.spec.lag_order = 3;
  f.spec.seasonal_periods = {4, 4};
  f.spec.use_garch = false;
  f.spec.k_star = 0.5;  // matches the gen_regimes aggregation below
  f.spec.mcmc.n_iter = n_iter;
  f.spec.mcmc.burn_in = burn;
  f.spec.trend_rho = VectorXd::Constant(2, 0.5);
  f.spec.finalize();

  f.sim = SimConfig::table_defaults();
  f.sim.m = 2;
  f.sim.n = n;
  f.sim.phi = f.sim.phi.topRows(2).eval();
  f.sim.sigma2_driver = VectorXd::Constant(2, 0.25);
  f.sim.beta0 = f.sim.beta0.topRows(2).eval();
  f.sim.beta1 = f.sim.beta1.topRows(2).eval();
  f.sim.rho_true = VectorXd::Constant(2, 0.5);
  f.sim.d_true = VectorXd::Zero(2);
  f.sim.s_true = {4, 4};

  Rng rng(seed);
  f.driver = gen_ar3(f.sim, rng);
  const RegimeSimPath path = gen_regimes(f.driver, 0.3, 0.7, 0.5);
  f.regimes = path.global;
  f.y.values = gen_observations(f.sim, f.driver, path.global, rng);
  f.y.names = {"a", "b"};
  f.y.index.resize(static_cast<std::size_t>(n));
  for (int t = 0; t < n; ++t) f.y.index[static_cast<std::size_t>(t)] = Date{18000 + t};
  return f;
}

}  // namespace

TEST_CASE("mse and mspe formulas") {
  MatrixXd actual(2, 1), fitted(2, 1);
  actual << 1.0, 2.0;
  fitted << 0.9, 2.1;  // residuals 0.1, -0.1
  CHECK(mse_metric(actual, fitted)[0] == doctest::Approx(0.01));
  CHECK(mspe_metric(actual, actual)[0] == 0.0);
  CHECK(exp_scaled(0.0) == 1.0);
  CHECK(exp_scaled(0.01) == doctest::Approx(std::exp(10.0)));
  MatrixXd wrong(3, 1);
  wrong.setZero();
  CHECK_THROWS_WITH_AS(mse_metric(actual, wrong), doctest::Contains("LengthMismatch"), Error);
}

TEST_CASE("one-step prediction: zero states and zero beta predict zero") {
  Fixture f = make_fixture(60);
  FittedModel fm;
  fm.spec = f.spec;
  fm.Sigma_u = 1e-12 * MatrixXd::Identity(2, 2);
  fm.Sigma_v = 1e-12 * MatrixXd::Identity(2, 2);
  fm.Sigma_w = 1e-12 * MatrixXd::Identity(2, 2);
  fm.Sigma_eps = MatrixXd::Identity(2, 2);
  fm.beta = VectorXd::Zero(2 * 2 * 3);
  fm.thresholds.tau_h_L = VectorXd::Constant(2, -0.4);
  fm.thresholds.tau_h_U = VectorXd::Constant(2, 0.4);

  const MatrixXd y_hist = MatrixXd::Zero(30, 2);
  const MatrixXd driver_hist = MatrixXd::Zero(30, 2);
  const VectorXd pred = one_step_predict(fm, y_hist, driver_hist, MatrixXd());
  CHECK(pred.cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("one-step prediction advances by the deterministic slope") {
  ModelSpec spec;
  spec.m = 1;
  spec.lag_order = 1;
  spec.seasonal_periods = {4};
  spec.use_garch = false;
  spec.regime_enabled = false;
  spec.trend_rho = VectorXd::Constant(1, 0.5);
  spec.trend_d = VectorXd::Constant(1, 0.25);
  spec.finalize();

  FittedModel fm;
  fm.spec = spec;
  fm.Sigma_u = 1e-8 * MatrixXd::Identity(1, 1);
  fm.Sigma_v = 1e-8 * MatrixXd::Identity(1, 1);
  fm.Sigma_w = 1e-8 * MatrixXd::Identity(1, 1);
  fm.Sigma_eps = 1e-4 * MatrixXd::Identity(1, 1);
  fm.beta = VectorXd::Zero(1);
  fm.thresholds.tau_h_L = VectorXd::Zero(1);
  fm.thresholds.tau_h_U = VectorXd::Zero(1);

  // history follows mu_{t+1} = mu_t + 0.25 exactly (delta pinned at D)
  const int n = 40;
  MatrixXd y(n, 1), driver(n, 1);
  for (int t = 0; t < n; ++t) {
    y(t, 0) = 0.25 * t;
    driver(t, 0) = 0.0;
  }
  OneStepPredictor pred(fm, y, driver, MatrixXd());
  const VectorXd p1 = pred.predict_next();
  CHECK(p1[0] == doctest::Approx(0.25 * n).epsilon(1e-4));
  pred.observe(VectorXd::Constant(1, 0.25 * n), VectorXd::Zero(1), VectorXd());
  const VectorXd p2 = pred.predict_next();
  CHECK(p2[0] - p1[0] == doctest::Approx(0.25).epsilon(1e-3));
}

TEST_CASE("prediction needs more history than the lag order") {
  Fixture f = make_fixture(60);
  FittedModel fm;
  fm.spec = f.spec;
  fm.Sigma_u = fm.Sigma_v = fm.Sigma_w = 0.01 * MatrixXd::Identity(2, 2);
  fm.Sigma_eps = MatrixXd::Identity(2, 2);
  fm.beta = VectorXd::Zero(12);
  fm.thresholds.tau_h_L = VectorXd::Constant(2, -0.4);
  fm.thresholds.tau_h_U = VectorXd::Constant(2, 0.4);
  const MatrixXd tiny = MatrixXd::Zero(2, 2);  // fewer rows than lag order 3
  CHECK_THROWS_WITH_AS(one_step_predict(fm, tiny, tiny, MatrixXd()),
                       doctest::Contains("InsufficientHistory"), Error);
}

TEST_CASE("window tiling: counts and non-overlap") {
  Fixture f = make_fixture(40 + 3 * 10, 8, 3);
  BacktestConfig cfg;
  cfg.window = 40;
  cfg.step = 10;
  const BacktestReport rep = rolling_backtest(f.spec, cfg, f.y, &f.driver, nullptr, 5);
  REQUIRE(rep.windows.size() == 3);
  for (std::size_t k = 0; k < rep.windows.size(); ++k) {
    const auto& w = rep.windows[k];
    CHECK(w.train_end - w.train_begin == 40);
    CHECK(w.test_end - w.test_begin == 10);
    CHECK(w.test_begin == w.train_end);
    if (k > 0) CHECK(w.test_begin == rep.windows[k - 1].test_begin + 10);
  }

  // exactly window + step rows -> one window
  Fixture g = make_fixture(50, 8, 3);
  const BacktestReport rep1 = rolling_backtest(g.spec, cfg, g.y, &g.driver, nullptr, 5);
  CHECK(rep1.windows.size() == 1);

  Fixture h = make_fixture(49, 8, 3);
  CHECK_THROWS_WITH_AS(rolling_backtest(h.spec, cfg, h.y, &h.driver, nullptr, 5),
                       doctest::Contains("InsufficientHistory"), Error);
}

TEST_CASE("report files are byte-identical across reruns with one seed") {
  Fixture f = make_fixture(55, 12, 4);
  BacktestConfig cfg;
  cfg.window = 40;
  cfg.step = 15;
  const BacktestReport r1 = rolling_backtest(f.spec, cfg, f.y, &f.driver, nullptr, 77);
  const BacktestReport r2 = rolling_backtest(f.spec, cfg, f.y, &f.driver, nullptr, 77);
  write_report_json("./bt_a.json", r1);
  write_report_json("./bt_b.json", r2);
  write_metrics_csv("./bt_a.csv", r1);
  write_metrics_csv("./bt_b.csv", r2);
  CHECK(slurp("./bt_a.json") == slurp("./bt_b.json"));
  CHECK(slurp("./bt_a.csv") == slurp("./bt_b.csv"));
  for (const char* p : {"./bt_a.json", "./bt_b.json", "./bt_a.csv", "./bt_b.csv"})
    std::remove(p);
}

TEST_CASE("reported values equal exp(metric * 1e3) of the raw metrics") {
  Fixture f = make_fixture(50, 10, 4);
  BacktestConfig cfg;
  cfg.window = 40;
  cfg.step = 10;
  const BacktestReport rep = rolling_backtest(f.spec, cfg, f.y, &f.driver, nullptr, 3);
  for (int i = 0; i < 2; ++i) {
    CHECK(rep.exp_mse_avg[i] == std::exp(rep.windows[0].mse[i] * 1e3));
    CHECK(rep.exp_mspe_avg[i] == std::exp(rep.windows[0].mspe[i] * 1e3));
  }
}

TEST_CASE("ar_garch baseline produces finite metrics") {
  Fixture f = make_fixture(60, 5, 2);
  BacktestConfig cfg;
  cfg.window = 45;
  cfg.step = 15;
  cfg.model = BacktestModel::ar_garch;
  const BacktestReport rep = rolling_backtest(f.spec, cfg, f.y, &f.driver, nullptr, 1);
  REQUIRE(rep.windows.size() == 1);
  CHECK(rep.windows[0].mse.allFinite());
  CHECK(rep.windows[0].mspe.allFinite());
}

TEST_CASE("true-parameter predictor beats an undertrained fit on average") {
  // Monte-Carlo ordering check: with parameters at the truth, one-step
  // predictions should on average outperform a barely trained model
  double true_total = 0.0, fitted_total = 0.0;
  for (int rep = 0; rep < 10; ++rep) {
    Fixture f = make_fixture(140, 8, 3, 100 + static_cast<std::uint64_t>(rep));
    const int T = 120, H = 20;

    FittedModel truth;
    truth.spec = f.spec;
    truth.Sigma_u = f.sim.sigma2_u * MatrixXd::Identity(2, 2);
    truth.Sigma_v = f.sim.sigma2_v * MatrixXd::Identity(2, 2);
    truth.Sigma_w = f.sim.sigma2_w * MatrixXd::Identity(2, 2);
    truth.Sigma_eps = f.sim.sigma2_eps * MatrixXd::Identity(2, 2);
    truth.beta = VectorXd::Zero(12);
    for (int i = 0; i < 2; ++i)
      for (int l = 0; l < 3; ++l) {
        truth.beta[i * 6 + l] = f.sim.beta0(i, l);
        truth.beta[i * 6 + 3 + l] = f.sim.beta1(i, l);
      }
    // the generator thresholded on full-sample quantiles; the true
    // predictor gets those exact values
    truth.thresholds.tau_h_L.resize(2);
    truth.thresholds.tau_h_U.resize(2);
    for (int i = 0; i < 2; ++i) {
      const VectorXd sorted = sorted_column(f.driver, i);
      const std::span<const double> s(sorted.data(), static_cast<std::size_t>(sorted.size()));
      truth.thresholds.tau_h_L[i] = quantile_sorted(s, 0.3);
      truth.thresholds.tau_h_U[i] = quantile_sorted(s, 0.7);
    }

    const RegimeInputs inputs = RegimeInputs::make(f.spec, f.driver.topRows(T), MatrixXd());
    Rng rng(999 + static_cast<std::uint64_t>(rep));
    const PosteriorDraws draws = run_mcmc(f.spec, f.y.values.topRows(T), inputs, rng);
    const FittedModel fitted = FittedModel::from_draws(f.spec, draws, inputs);

    const FittedModel* models[2] = {&truth, &fitted};
    for (const FittedModel* fm : models) {
      OneStepPredictor pred(*fm, f.y.values.topRows(T), f.driver.topRows(T), MatrixXd());
      MatrixXd preds(H, 2);
      for (int h = 0; h < H; ++h) {
        preds.row(h) = pred.predict_next().transpose();
        pred.observe(f.y.values.row(T + h).transpose(), f.driver.row(T + h).transpose(),
                     VectorXd());
      }
      const double m = mspe_metric(f.y.values.middleRows(T, H), preds).mean();
      (fm == &truth ? true_total : fitted_total) += m;
    }
  }
  CHECK(true_total <= fitted_total);
}

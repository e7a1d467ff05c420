#include "shmbs/harness.hpp"

#include <omp.h>

#include <chrono>
#include <cmath>
#include <fstream>

#include "shmbs/csv.hpp"
#include "shmbs/jsonout.hpp"

namespace shmbs {

VectorXd mse_metric(const MatrixXd& actual, const MatrixXd& fitted) {
  if (actual.rows() != fitted.rows() || actual.cols() != fitted.cols())
    raise(Errc::length_mismatch, "actual/fitted shapes differ");
  if (actual.rows() == 0) raise(Errc::length_mismatch, "empty metric window");
  return (actual - fitted).array().square().colwise().mean().transpose();
}

VectorXd mspe_metric(const MatrixXd& actual, const MatrixXd& predictions) {
  return mse_metric(actual, predictions);  // same form, held-out inputs
}

FittedModel FittedModel::from_draws(const ModelSpec& spec, const PosteriorDraws& draws,
                                    const RegimeInputs& inputs) {
  FittedModel fm;
  fm.spec = spec;
  fm.Sigma_u = draws.sigma_mean(draws.Sigma_u);
  fm.Sigma_v = draws.sigma_mean(draws.Sigma_v);
  fm.Sigma_w = draws.sigma_mean(draws.Sigma_w);
  fm.Sigma_eps = draws.sigma_mean(draws.Sigma_eps);
  fm.beta = draws.beta_mean();
  if (spec.regime_enabled) {
    const int kept = draws.n_iter - draws.burn_in;
    const VectorXd t1 = draws.theta1.bottomRows(kept).colwise().mean().transpose();
    fm.theta1 = ThetaOne::from_vector(t1);
    fm.thresholds = inputs.thresholds(fm.theta1);
  } else {
    const auto m = static_cast<Eigen::Index>(spec.m);
    fm.thresholds.tau_h_L = VectorXd::Zero(m);
    fm.thresholds.tau_h_U = VectorXd::Zero(m);
    fm.thresholds.tau_s_L = VectorXd::Zero(m);
    fm.thresholds.tau_s_U = VectorXd::Zero(m);
  }
  return fm;
}

OneStepPredictor::OneStepPredictor(const FittedModel& model, const MatrixXd& y_hist,
                                   const MatrixXd& driver_hist, const MatrixXd& soft_hist)
    : fm_(model), driver_hist_(driver_hist), soft_hist_(soft_hist) {
  const int n = static_cast<int>(y_hist.rows());
  const int m = fm_.spec.m;
  if (n < fm_.spec.lag_order + 1)
    raise(Errc::insufficient_history, "need more history than the lag order");
  if (driver_hist.rows() != n) raise(Errc::misaligned_index, "driver history length mismatch");

  MbsComponents comps = MbsComponents::defaults(fm_.spec);
  comps.Sigma_u = fm_.Sigma_u;
  comps.Sigma_v = fm_.Sigma_v;
  comps.Sigma_w = fm_.Sigma_w;
  comps.Sigma_eps = fm_.Sigma_eps;
  model_ = assemble(fm_.spec, comps);
  rqr_ = model_.R * model_.Q * model_.R.transpose();

  // regime path over the training history
  ArrayXi path;
  if (fm_.spec.regime_enabled) {
    const ArrayXXi per_asset = indicator_path(fm_.spec.regime_type, driver_hist_, soft_hist_,
                                              fm_.thresholds, fm_.spec.regime_init);
    per_asset_state_ = per_asset.row(n - 1).transpose();
    path = aggregate(per_asset, fm_.spec.k_star, fm_.spec.regime_init);
    global_state_ = path[n - 1];
  } else {
    per_asset_state_ = ArrayXi::Zero(m);
    path = ArrayXi::Zero(n);
    global_state_ = 0;
  }

  // filter through the regime-adjusted training data
  const RegressionDesign design = RegressionDesign::build(
      driver_hist_, fm_.spec.lag_order, fm_.spec.cross_lags, fm_.spec.regime_enabled);
  const MatrixXd y_adj = y_hist - design.xi_full(fm_.beta, path);
  const KalmanOutput filt = kalman_filter(model_, y_adj);
  const Eigen::Index last = n - 1;
  a_ = model_.c + model_.T * filt.a_filt.row(last).transpose();
  P_ = model_.T * filt.P_filt[static_cast<std::size_t>(last)] * model_.T.transpose() + rqr_;
  symmetrize(P_);
}

std::pair<ArrayXi, int> OneStepPredictor::step_regime() const {
  const int m = fm_.spec.m;
  ArrayXi next = per_asset_state_;
  if (!fm_.spec.regime_enabled) return {next, 0};
  const Eigen::Index last = driver_hist_.rows() - 1;
  const bool needs_soft = fm_.spec.regime_type != RegimeType::I;
  for (int i = 0; i < m; ++i) {
    const double r = driver_hist_(last, i);
    const double d = needs_soft ? soft_hist_(last, i) : 0.0;
    const double tsL = fm_.thresholds.tau_s_L.size() > 0 ? fm_.thresholds.tau_s_L[i] : 0.0;
    const double tsU = fm_.thresholds.tau_s_U.size() > 0 ? fm_.thresholds.tau_s_U[i] : 0.0;
    switch (classify_zone(fm_.spec.regime_type, r, d, fm_.thresholds.tau_h_L[i],
                          fm_.thresholds.tau_h_U[i], tsL, tsU)) {
      case Zone::regime1: next[i] = 1; break;
      case Zone::regime0: next[i] = 0; break;
      case Zone::hysteresis: break;
    }
  }
  const double need = fm_.spec.k_star * static_cast<double>(m);
  const int ones = next.sum();
  const int zeros = m - ones;
  int g = global_state_;
  if (static_cast<double>(ones) >= need)
    g = 1;
  else if (static_cast<double>(zeros) >= need)
    g = 0;
  return {next, g};
}

VectorXd OneStepPredictor::regression_term(int regime) const {
  const int m = fm_.spec.m;
  const int p = fm_.spec.lag_order;
  const Eigen::Index n = driver_hist_.rows();
  if (n < p) raise(Errc::insufficient_history, "fewer lags available than the lag order");
  const int kb = fm_.spec.cross_lags ? m * p : p;
  const int cols_per_asset = (fm_.spec.regime_enabled ? 2 : 1) * kb;
  VectorXd xi = VectorXd::Zero(m);
  for (int i = 0; i < m; ++i) {
    const int base = i * cols_per_asset + (fm_.spec.regime_enabled && regime == 1 ? kb : 0);
    for (int l = 1; l <= p; ++l) {
      if (fm_.spec.cross_lags) {
        for (int j = 0; j < m; ++j)
          xi[i] += fm_.beta[base + (l - 1) * m + j] * driver_hist_(n - l, j);
      } else {
        xi[i] += fm_.beta[base + (l - 1)] * driver_hist_(n - l, i);
      }
    }
  }
  return xi;
}

VectorXd OneStepPredictor::predict_next() const {
  const auto [next, g] = step_regime();
  return model_.Z * a_ + regression_term(g);
}

int OneStepPredictor::next_regime() const { return step_regime().second; }

void OneStepPredictor::observe(const VectorXd& y_row, const VectorXd& driver_row,
                               const VectorXd& soft_row) {
  const auto [next, g] = step_regime();
  per_asset_state_ = next;
  global_state_ = g;

  const VectorXd xi = regression_term(g);
  const VectorXd v = y_row - xi - model_.Z * a_;
  MatrixXd F = model_.Z * P_ * model_.Z.transpose() + model_.H;
  symmetrize(F);
  Eigen::LLT<MatrixXd> llt(F);
  if (llt.info() != Eigen::Success)
    raise(Errc::singular_innovation_covariance, "prediction-step innovation covariance singular");
  const MatrixXd K = model_.T * P_ * model_.Z.transpose() * llt.solve(
                         MatrixXd::Identity(F.rows(), F.cols()));
  a_ = model_.c + model_.T * a_ + K * v;
  P_ = model_.T * P_ * (model_.T - K * model_.Z).transpose() + rqr_;
  symmetrize(P_);

  driver_hist_.conservativeResize(driver_hist_.rows() + 1, Eigen::NoChange);
  driver_hist_.row(driver_hist_.rows() - 1) = driver_row.transpose();
  if (soft_hist_.size() > 0) {
    soft_hist_.conservativeResize(soft_hist_.rows() + 1, Eigen::NoChange);
    soft_hist_.row(soft_hist_.rows() - 1) = soft_row.transpose();
  }
}

VectorXd one_step_predict(const FittedModel& model, const MatrixXd& y_hist,
                          const MatrixXd& driver_hist, const MatrixXd& soft_hist) {
  return OneStepPredictor(model, y_hist, driver_hist, soft_hist).predict_next();
}

BacktestModel parse_backtest_model(const std::string& s) {
  if (s == "shmbs") return BacktestModel::shmbs;
  if (s == "mbs" || s == "mbs_noregime") return BacktestModel::mbs_noregime;
  if (s == "ar_garch") return BacktestModel::ar_garch;
  raise(Errc::config_error, "model must be shmbs, mbs_noregime or ar_garch");
}

std::string backtest_model_name(BacktestModel m) {
  switch (m) {
    case BacktestModel::shmbs: return "shmbs";
    case BacktestModel::mbs_noregime: return "mbs_noregime";
    case BacktestModel::ar_garch: return "ar_garch";
  }
  return "?";
}

double BacktestReport::mean_mspe() const {
  double s = 0.0;
  int k = 0;
  for (const auto& w : windows) {
    s += w.mspe.mean();
    ++k;
  }
  return k > 0 ? s / k : 0.0;
}

namespace {

// per-asset AR(p) with intercept via least squares; GARCH(1,1) fitted on
// the residuals for volatility metadata
struct ArBaseline {
  MatrixXd coef;      // m x (p+1): intercept then lags
  VectorXd mse;

  static ArBaseline fit(const MatrixXd& y, int p) {
    const int n = static_cast<int>(y.rows());
    const int m = static_cast<int>(y.cols());
    ArBaseline b;
    b.coef.resize(m, p + 1);
    b.mse.resize(m);
    MatrixXd X(n - p, p + 1);
    for (int i = 0; i < m; ++i) {
      VectorXd t(n - p);
      for (int r = 0; r < n - p; ++r) {
        X(r, 0) = 1.0;
        for (int l = 1; l <= p; ++l) X(r, l) = y(p + r - l, i);
        t[r] = y(p + r, i);
      }
      const VectorXd c = (X.transpose() * X)
                             .ldlt()
                             .solve(X.transpose() * t);
      b.coef.row(i) = c.transpose();
      b.mse[i] = (t - X * c).squaredNorm() / static_cast<double>(n - p);
    }
    return b;
  }

  VectorXd predict(const MatrixXd& hist, int p) const {
    const Eigen::Index n = hist.rows();
    VectorXd out(coef.rows());
    for (Eigen::Index i = 0; i < coef.rows(); ++i) {
      double v = coef(i, 0);
      for (int l = 1; l <= p; ++l) v += coef(i, l) * hist(n - l, i);
      out[i] = v;
    }
    return out;
  }
};

WindowResult run_window(const ModelSpec& base_spec, const BacktestConfig& cfg, const MatrixXd& y,
                        const MatrixXd& driver_raw, const SoftScoreSeries* soft, int w0,
                        Rng rng) {
  const int T = cfg.window;
  const int H = cfg.step;
  const int m = static_cast<int>(y.cols());

  WindowResult res;
  res.train_begin = w0;
  res.train_end = w0 + T;
  res.test_begin = w0 + T;
  res.test_end = w0 + T + H;
  const auto tic = std::chrono::steady_clock::now();

  const MatrixXd y_train = y.middleRows(w0, T);
  const MatrixXd y_test = y.middleRows(w0 + T, H);

  if (cfg.model == BacktestModel::ar_garch) {
    const int p = base_spec.lag_order;
    const ArBaseline ar = ArBaseline::fit(y_train, p);
    // in-sample fit
    MatrixXd fitted(T - p, m);
    for (int r = 0; r < T - p; ++r)
      fitted.row(r) = ar.predict(y.middleRows(w0, p + r), p).transpose();
    res.mse = mse_metric(y.middleRows(w0 + p, T - p), fitted);
    // volatility metadata only; the point forecast is the AR mean
    for (int i = 0; i < m; ++i) {
      VectorXd resid(T - p);
      for (int r = 0; r < T - p; ++r) resid[r] = y(w0 + p + r, i) - fitted(r, i);
      try {
        (void)fit_garch11(resid);
      } catch (const Error&) {
        // degenerate residuals: keep the AR point forecast regardless
      }
    }
    MatrixXd preds(H, m);
    for (int h = 0; h < H; ++h)
      preds.row(h) = ar.predict(y.middleRows(w0, T + h), p).transpose();
    res.mspe = mspe_metric(y_test, preds);
    res.regime_path_test = ArrayXi::Zero(H);
    res.wall_sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - tic).count();
    return res;
  }

  ModelSpec spec = base_spec;
  if (cfg.model == BacktestModel::mbs_noregime) spec.regime_enabled = false;

  // driver: de-volatilized on the training window, frozen fit extended
  // through the test days
  MatrixXd driver_train(T, m), driver_full(T + H, m);
  if (spec.use_garch) {
    for (int i = 0; i < m; ++i) {
      const VectorXd r_train = driver_raw.col(i).segment(w0, T);
      const GarchFit fit = fit_garch11(r_train);
      driver_train.col(i) = degarch(fit, r_train);
      driver_full.col(i).head(T) = driver_train.col(i);
      driver_full.col(i).tail(H) =
          degarch_extend(fit, r_train, driver_raw.col(i).segment(w0 + T, H));
    }
  } else {
    driver_train = driver_raw.middleRows(w0, T);
    driver_full = driver_raw.middleRows(w0, T + H);
  }

  // soft scores: normalization constants re-estimated on the window
  MatrixXd soft_train, soft_full;
  if (soft != nullptr && soft->rows() > 0) {
    SoftScoreSeries win = soft->slice(w0, w0 + T + H);
    win = normalize_and_combine(win, 0, T);
    soft_full = win.dt;
    soft_train = win.dt.topRows(T);
  }

  const RegimeInputs inputs = RegimeInputs::make(spec, driver_train, soft_train);
  const PosteriorDraws draws = run_mcmc(spec, y_train, inputs, rng);
  const FittedModel fm = FittedModel::from_draws(spec, draws, inputs);

  // in-sample fit at posterior means
  {
    MbsComponents comps = MbsComponents::defaults(spec);
    comps.Sigma_u = fm.Sigma_u;
    comps.Sigma_v = fm.Sigma_v;
    comps.Sigma_w = fm.Sigma_w;
    comps.Sigma_eps = fm.Sigma_eps;
    const StateSpaceModel model = assemble(spec, comps);
    ArrayXi path = ArrayXi::Zero(T);
    if (spec.regime_enabled) {
      const ArrayXXi per_asset = indicator_path(spec.regime_type, driver_train, soft_train,
                                                fm.thresholds, spec.regime_init);
      path = aggregate(per_asset, spec.k_star, spec.regime_init);
    }
    const RegressionDesign design =
        RegressionDesign::build(driver_train, spec.lag_order, spec.cross_lags, spec.regime_enabled);
    const MatrixXd xi = design.xi_full(fm.beta, path);
    const MatrixXd alpha = kalman_smoother(model, kalman_filter(model, y_train - xi));
    const StateLayout lay = StateLayout::make(spec);
    MatrixXd fitted(T, m);
    for (int i = 0; i < m; ++i)
      fitted.col(i) = alpha.col(lay.mu(i)) + alpha.col(lay.kappa0(i)) + xi.col(i);
    res.mse = mse_metric(y_train, fitted);
  }

  // one-step-ahead predictions with fixed parameters and updated data
  OneStepPredictor pred(fm, y_train, driver_train, soft_train);
  MatrixXd preds(H, m);
  res.regime_path_test.resize(H);
  for (int h = 0; h < H; ++h) {
    preds.row(h) = pred.predict_next().transpose();
    res.regime_path_test[h] = pred.next_regime();
    const VectorXd soft_row =
        soft_full.size() > 0 ? VectorXd(soft_full.row(T + h).transpose()) : VectorXd();
    pred.observe(y_test.row(h).transpose(), driver_full.row(T + h).transpose(), soft_row);
  }
  res.mspe = mspe_metric(y_test, preds);

  res.beta_mean = draws.beta_mean();
  res.inclusion_freq = draws.inclusion_freq();
  res.tau_mean = draws.tau_mean();
  res.accept_post = draws.accept_post;
  res.wall_sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - tic).count();
  return res;
}

}  // namespace

BacktestReport rolling_backtest(const ModelSpec& spec, const BacktestConfig& cfg,
                                const MultiSeries& y, const MatrixXd* driver,
                                const SoftScoreSeries* soft, std::uint64_t seed) {
  y.validate();
  const int n = static_cast<int>(y.rows());
  if (n < cfg.window + cfg.step)
    raise(Errc::insufficient_history, "need at least window + step observations");
  const int n_windows = (n - cfg.window) / cfg.step;

  const MatrixXd driver_raw = driver != nullptr ? *driver : y.values;
  if (driver_raw.rows() != n) raise(Errc::misaligned_index, "driver panel length mismatch");
  if (soft != nullptr && soft->rows() > 0 && soft->rows() != n)
    raise(Errc::misaligned_index, "soft panel length mismatch");

  BacktestReport report;
  report.config = cfg;
  report.seed = seed;
  report.n_iter = spec.mcmc.n_iter;
  report.burn_in = spec.mcmc.burn_in;
  report.asset_names = y.names;
  report.windows.resize(static_cast<std::size_t>(n_windows));

  const Rng master(seed);
  if (cfg.parallel_windows) {
#pragma omp parallel for schedule(dynamic)
    for (int w = 0; w < n_windows; ++w)
      report.windows[static_cast<std::size_t>(w)] =
          run_window(spec, cfg, y.values, driver_raw, soft, w * cfg.step,
                     master.spawn(static_cast<std::uint64_t>(w)));
  } else {
    for (int w = 0; w < n_windows; ++w)
      report.windows[static_cast<std::size_t>(w)] =
          run_window(spec, cfg, y.values, driver_raw, soft, w * cfg.step,
                     master.spawn(static_cast<std::uint64_t>(w)));
  }

  const int m = static_cast<int>(y.cols());
  report.exp_mse_avg = VectorXd::Zero(m);
  report.exp_mspe_avg = VectorXd::Zero(m);
  for (const auto& w : report.windows) {
    for (int i = 0; i < m; ++i) {
      report.exp_mse_avg[i] += exp_scaled(w.mse[i]);
      report.exp_mspe_avg[i] += exp_scaled(w.mspe[i]);
    }
  }
  report.exp_mse_avg /= std::max(n_windows, 1);
  report.exp_mspe_avg /= std::max(n_windows, 1);
  return report;
}

// ----------------------------------------------------------- serialization

void write_draws_csv(const std::string& path, const PosteriorDraws& draws) {
  std::ofstream out(path);
  if (!out) raise(Errc::io_error, "cannot write '" + path + "'");
  out << "iter,name,value\n";
  const auto emit = [&](int iter, const std::string& name, double v) {
    out << iter << ',' << name << ',' << format_g17(v) << '\n';
  };
  const int m = draws.Sigma_eps.empty() ? 0 : static_cast<int>(draws.Sigma_eps.front().rows());
  const char* t1names[4] = {"q_h_l", "q_h_u", "q_s_l", "q_s_u"};
  for (int it = 0; it < draws.n_iter; ++it) {
    for (int j = 0; j < 4; ++j) emit(it, t1names[j], draws.theta1(it, j));
    for (int i = 0; i < m; ++i) {
      emit(it, "tau_h_l_" + std::to_string(i + 1), draws.tau(it, i));
      emit(it, "tau_h_u_" + std::to_string(i + 1), draws.tau(it, m + i));
      emit(it, "tau_s_l_" + std::to_string(i + 1), draws.tau(it, 2 * m + i));
      emit(it, "tau_s_u_" + std::to_string(i + 1), draws.tau(it, 3 * m + i));
    }
    for (Eigen::Index c = 0; c < draws.beta.cols(); ++c) {
      emit(it, draws.beta_names[static_cast<std::size_t>(c)], draws.beta(it, c));
      emit(it, "gamma_" + draws.beta_names[static_cast<std::size_t>(c)],
           static_cast<double>(draws.gamma(it, c)));
    }
    const auto emit_cov = [&](const char* base, const std::vector<MatrixXd>& chain) {
      const MatrixXd& S = chain[static_cast<std::size_t>(it)];
      for (int i = 0; i < m; ++i)
        for (int j = 0; j <= i; ++j)
          emit(it, std::string(base) + "_" + std::to_string(i + 1) + std::to_string(j + 1),
               S(i, j));
    };
    emit_cov("sigma_u", draws.Sigma_u);
    emit_cov("sigma_v", draws.Sigma_v);
    emit_cov("sigma_w", draws.Sigma_w);
    emit_cov("sigma_eps", draws.Sigma_eps);
    emit(it, "loglik", draws.loglik[it]);
  }
}

void write_summary_json(const std::string& path, const ModelSpec& spec,
                        const PosteriorDraws& draws) {
  const int kept = draws.n_iter - draws.burn_in;
  JsonWriter w;
  w.begin_object();
  w.kv("n_iter", draws.n_iter);
  w.kv("burn_in", draws.burn_in);
  w.kv("seed", draws.seed);
  w.kv("regime_type", regime_type_name(spec.regime_type));
  w.kv("accept_rate_burnin", draws.accept_burnin);
  w.kv("accept_rate_post", draws.accept_post);

  w.key("beta_names").value(draws.beta_names);
  w.key("beta_mean").value(draws.beta_mean());
  {
    VectorXd sd(draws.beta.cols());
    const VectorXd mu = draws.beta_mean();
    const MatrixXd tailb = draws.beta.bottomRows(kept);
    for (Eigen::Index c = 0; c < tailb.cols(); ++c)
      sd[c] = sample_sd(VectorXd(tailb.col(c)));
    w.key("beta_sd").value(sd);
    (void)mu;
  }
  w.key("inclusion_freq").value(draws.inclusion_freq());
  w.key("tau_mean").value(draws.tau_mean());
  w.key("theta1_mean")
      .value(VectorXd(draws.theta1.bottomRows(kept).colwise().mean().transpose()));

  const auto cov_diag = [&](const char* name, const std::vector<MatrixXd>& chain) {
    w.key(name).value(VectorXd(draws.sigma_mean(chain).diagonal()));
  };
  cov_diag("sigma_u_diag_mean", draws.Sigma_u);
  cov_diag("sigma_v_diag_mean", draws.Sigma_v);
  cov_diag("sigma_w_diag_mean", draws.Sigma_w);
  cov_diag("sigma_eps_diag_mean", draws.Sigma_eps);

  // hyperparameter estimates aggregated over the stored state draws
  w.key("hyper_estimates").begin_object();
  try {
    const HyperEstimates est =
        estimate_hyperparams(draws.state_paths, StateLayout::make(spec));
    w.key("trend_rho").value(est.trend_rho);
    w.key("trend_d").value(est.trend_d);
    w.key("seasonal_period").begin_array();
    for (int s : est.seasonal) w.value(s);
    w.end_array();
  } catch (const Error& e) {
    w.kv("error", std::string(e.what()));
  }
  w.end_object();

  w.key("regime1_freq").value(draws.regime1_freq);
  w.end_object();
  w.write_file(path);
}

void write_report_json(const std::string& path, const BacktestReport& report) {
  JsonWriter w;
  w.begin_object();
  w.kv("model", backtest_model_name(report.config.model));
  w.kv("window", report.config.window);
  w.kv("step", report.config.step);
  w.kv("n_windows", static_cast<int>(report.windows.size()));
  w.kv("n_iter", report.n_iter);
  w.kv("burn_in", report.burn_in);
  w.kv("seed", report.seed);
  w.key("asset_names").value(report.asset_names);
  w.key("aggregate").begin_object();
  w.key("exp_mse_avg").value(report.exp_mse_avg);
  w.key("exp_mspe_avg").value(report.exp_mspe_avg);
  w.end_object();
  w.key("windows").begin_array();
  for (const auto& win : report.windows) {
    w.begin_object();
    w.kv("train_begin", win.train_begin);
    w.kv("train_end", win.train_end);
    w.kv("test_begin", win.test_begin);
    w.kv("test_end", win.test_end);
    w.key("mse").value(win.mse);
    w.key("mspe").value(win.mspe);
    if (win.beta_mean.size() > 0) {
      w.key("beta_mean").value(win.beta_mean);
      w.key("inclusion_freq").value(win.inclusion_freq);
      w.key("tau_mean").value(win.tau_mean);
      w.kv("accept_rate_post", win.accept_post);
    }
    w.key("regime_path_test").begin_array();
    for (Eigen::Index t = 0; t < win.regime_path_test.size(); ++t)
      w.value(win.regime_path_test[t]);
    w.end_array();
    w.end_object();
  }
  w.end_array();
  w.end_object();
  w.write_file(path);
}

void write_timing_csv(const std::string& path, const BacktestReport& report) {
  std::ofstream out(path);
  if (!out) raise(Errc::io_error, "cannot write '" + path + "'");
  out << "window,wall_sec\n";
  for (std::size_t k = 0; k < report.windows.size(); ++k)
    out << k << ',' << format_g17(report.windows[k].wall_sec) << '\n';
}

void write_metrics_csv(const std::string& path, const BacktestReport& report) {
  std::ofstream out(path);
  if (!out) raise(Errc::io_error, "cannot write '" + path + "'");
  out << "window,asset,metric,value\n";
  for (std::size_t k = 0; k < report.windows.size(); ++k) {
    const auto& win = report.windows[k];
    for (Eigen::Index i = 0; i < win.mse.size(); ++i) {
      const std::string asset = report.asset_names[static_cast<std::size_t>(i)];
      out << k << ',' << asset << ",mse," << format_g17(win.mse[i]) << '\n';
      out << k << ',' << asset << ",mspe," << format_g17(win.mspe[i]) << '\n';
      out << k << ',' << asset << ",exp_mse," << format_g17(exp_scaled(win.mse[i])) << '\n';
      out << k << ',' << asset << ",exp_mspe," << format_g17(exp_scaled(win.mspe[i])) << '\n';
    }
  }
}

}  // namespace shmbs

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "shmbs/common.hpp"
#include "shmbs/garch.hpp"
#include "shmbs/inference.hpp"
#include "shmbs/series.hpp"

namespace shmbs {

// Eq-style fit and prediction metrics, one value per asset.
VectorXd mse_metric(const MatrixXd& actual, const MatrixXd& fitted);
VectorXd mspe_metric(const MatrixXd& actual, const MatrixXd& predictions);
inline double exp_scaled(double metric) { return std::exp(metric * 1e3); }

// Plug-in model at posterior means, frozen after one training fit.
struct FittedModel {
  ModelSpec spec;
  MatrixXd Sigma_u, Sigma_v, Sigma_w, Sigma_eps;
  VectorXd beta;
  ThetaOne theta1;
  RegimeThresholds thresholds;  // induced by theta1 on the training window

  static FittedModel from_draws(const ModelSpec& spec, const PosteriorDraws& draws,
                                const RegimeInputs& inputs);
};

// Sequential one-step-ahead predictor: fixed parameters, daily data
// updates through the Kalman recursion, hysteresis state carried over
// from the training span.
class OneStepPredictor {
 public:
  OneStepPredictor(const FittedModel& model, const MatrixXd& y_hist, const MatrixXd& driver_hist,
                   const MatrixXd& soft_hist);

  // prediction of the next observation given everything seen so far
  VectorXd predict_next() const;
  // regime label the next prediction would use
  int next_regime() const;
  // advance: commit the regime transition and filter in the new row
  void observe(const VectorXd& y_row, const VectorXd& driver_row, const VectorXd& soft_row);

 private:
  std::pair<ArrayXi, int> step_regime() const;
  VectorXd regression_term(int regime) const;

  FittedModel fm_;
  StateSpaceModel model_;
  MatrixXd rqr_;
  VectorXd a_;   // predicted state for the next time point
  MatrixXd P_;
  MatrixXd driver_hist_, soft_hist_;
  ArrayXi per_asset_state_;
  int global_state_ = 0;
};

// Spec-facing wrapper: one prediction from full history.
VectorXd one_step_predict(const FittedModel& model, const MatrixXd& y_hist,
                          const MatrixXd& driver_hist, const MatrixXd& soft_hist);

enum class BacktestModel { shmbs, mbs_noregime, ar_garch };
BacktestModel parse_backtest_model(const std::string& s);
std::string backtest_model_name(BacktestModel m);

struct BacktestConfig {
  int window = 252;
  int step = 63;
  BacktestModel model = BacktestModel::shmbs;
  bool parallel_windows = false;
};

struct WindowResult {
  int train_begin = 0, train_end = 0, test_begin = 0, test_end = 0;
  VectorXd mse, mspe;           // per asset
  VectorXd beta_mean, inclusion_freq, tau_mean;
  double accept_post = 0.0;
  double wall_sec = 0.0;
  ArrayXi regime_path_test;
};

struct BacktestReport {
  BacktestConfig config;
  std::uint64_t seed = 0;
  int n_iter = 0, burn_in = 0;
  std::vector<std::string> asset_names;
  std::vector<WindowResult> windows;
  VectorXd exp_mse_avg, exp_mspe_avg;  // per asset, averaged over windows

  double mean_mspe() const;  // across assets and windows, unscaled
};

// Rolling-window protocol: fit on `window` days, predict one step ahead
// through the following `step` days with fixed parameters, advance by
// `step`. GARCH fits, thresholds and soft-score normalization are
// re-estimated on each training window.
BacktestReport rolling_backtest(const ModelSpec& spec, const BacktestConfig& cfg,
                                const MultiSeries& y, const MatrixXd* driver,
                                const SoftScoreSeries* soft, std::uint64_t seed);

// report emission
void write_draws_csv(const std::string& path, const PosteriorDraws& draws);
void write_summary_json(const std::string& path, const ModelSpec& spec,
                        const PosteriorDraws& draws);
void write_report_json(const std::string& path, const BacktestReport& report);
void write_metrics_csv(const std::string& path, const BacktestReport& report);
// wall-clock sits in its own file so report.json stays byte-identical
// across runs of the same (config, seed, data)
void write_timing_csv(const std::string& path, const BacktestReport& report);

}  // namespace shmbs

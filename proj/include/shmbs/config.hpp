#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "shmbs/common.hpp"

namespace shmbs {

// Flat key/value configuration document: one `key = value` pair per
// line, '#' comments, lower_snake_case keys. Unknown keys are an error.
class Config {
 public:
  static Config parse_file(const std::string& path);
  static Config parse_string(const std::string& text);

  bool has(const std::string& key) const { return kv_.count(key) > 0; }
  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key) const;
  int get_int(const std::string& key, int fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_doubles(const std::string& key) const;  // comma-separated
  std::vector<double> get_doubles(const std::string& key, const std::vector<double>& fallback) const;
  std::vector<int> get_ints(const std::string& key, const std::vector<int>& fallback) const;

  const std::map<std::string, std::string>& entries() const { return kv_; }

 private:
  std::map<std::string, std::string> kv_;
};

enum class RegimeType { I = 1, II = 2, III = 3, IV = 4 };

RegimeType parse_regime_type(const std::string& s);
std::string regime_type_name(RegimeType t);

struct PriorSpec {
  double h = 0.05;        // tail fraction for the quantile-level bounds
  double c_star = 0.10;   // minimum quantile gap between lower and upper level
  double w_u = 0.0, w_v = 0.0, w_w = 0.0;  // IW dof; 0 = default m+2
  VectorXd W_u, W_v, W_w;                  // diagonal IW scales; empty = 0.01 I
  double phi = 0.0;                        // IW dof for Sigma_eps; 0 = default m+2
  VectorXd nu;                             // diagonal IW scale for Sigma_eps; empty = 0.01 I
  double psi = 1.0;                        // prior-information weight
  double c_gamma = 0.0;                    // prior mean for active coefficients
  VectorXd p_expected;                     // expected nonzero predictors per asset; empty = k_i/2

  void finalize(int m);  // fill defaults that depend on m
  void validate(int m) const;
};

struct McmcSpec {
  int n_iter = 1500;
  int burn_in = 500;
  double rw_scale = 2.38 * 2.38 / 4.0;  // proposal scaling constant c
  int report_thin = 50;                 // keep every k-th state path

  void validate() const;
};

struct ModelSpec {
  int m = 0;
  int lag_order = 3;  // p, regression lags in the regime-switching term
  RegimeType regime_type = RegimeType::I;
  bool regime_enabled = true;  // false gives the single-block no-regime variant
  double k_star = 2.0 / 3.0;
  std::vector<int> seasonal_periods;  // s_i per series
  bool cyclical_enabled = false;
  bool use_garch = true;    // de-volatilize the driver before thresholding
  bool cross_lags = false;  // regressors: all series' lags instead of own lags
  int regime_init = 0;
  VectorXd trend_rho;  // working learning rates, default 0.5
  VectorXd trend_d;    // working long-run slopes, default 0
  VectorXd cycle_zeta, cycle_lambda;
  PriorSpec prior;
  McmcSpec mcmc;
  std::uint64_t seed = 0;

  void finalize();  // fill m-dependent defaults
  void validate() const;
  int predictors_per_asset() const { return cross_lags ? m * lag_order : lag_order; }

  static ModelSpec from_config(const Config& cfg);
};

// every key any subcommand understands; parse rejects the rest
const std::vector<std::string>& known_config_keys();

}  // namespace shmbs

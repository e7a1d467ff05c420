#include "shmbs/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace shmbs {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t");
  auto e = s.find_last_not_of(" \t");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

}  // namespace

const std::vector<std::string>& known_config_keys() {
  static const std::vector<std::string> keys = {
      // model
      "m", "lag_order", "regime_type", "regime_enabled", "k_star", "seasonal_periods",
      "cyclical_enabled", "use_garch", "cross_lags", "regime_init", "rho", "trend_d",
      "cycle_zeta", "cycle_lambda", "seed",
      // prior
      "h", "c_star", "w_u", "w_v", "w_w", "scale_u", "scale_v", "scale_w", "phi", "nu", "psi",
      "c_gamma", "p_expected",
      // mcmc
      "n_iter", "burn_in", "rw_scale", "report_thin",
      // harness / io
      "data_file", "driver_file", "soft_file", "output_dir", "window", "step", "model",
      "parallel_windows",
      // simulate
      "n", "phi_1", "phi_2", "phi_3", "sigma2_driver", "beta0_1", "beta0_2", "beta0_3",
      "beta1_1", "beta1_2", "beta1_3", "sigma2_u", "sigma2_v", "sigma2_w", "sigma2_eps",
      "rho_true", "s_true", "q_l", "q_u",
      // softinfo
      "lexicon_file", "corpus_file", "epu_file", "watchlist_1", "watchlist_2", "watchlist_3",
      "watchlist_4", "watchlist_5", "watchlist_6", "watchlist_7", "watchlist_8", "watchlist_9",
      "asset_names",
      // zones
      "tau_h_l", "tau_h_u", "tau_s_l", "tau_s_u", "grid_min", "grid_max", "grid_n",
  };
  return keys;
}

Config Config::parse_string(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  const auto& known = known_config_keys();
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      raise(Errc::config_error, "line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (std::find(known.begin(), known.end(), key) == known.end())
      raise(Errc::config_error, "unknown key '" + key + "'");
    if (cfg.kv_.count(key))
      raise(Errc::config_error, "duplicate key '" + key + "'");
    cfg.kv_[key] = value;
  }
  return cfg;
}

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(Errc::config_error, "cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_string(ss.str());
}

std::string Config::get_string(const std::string& key) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) raise(Errc::config_error, "missing required key '" + key + "'");
  return it->second;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  auto it = kv_.find(key);
  return it == kv_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key) const {
  const std::string v = get_string(key);
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (end != v.c_str() + v.size() || v.empty())
    raise(Errc::config_error, "key '" + key + "': expected a number, got '" + v + "'");
  return x;
}

double Config::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

int Config::get_int(const std::string& key) const {
  const double x = get_double(key);
  const int i = static_cast<int>(x);
  if (static_cast<double>(i) != x)
    raise(Errc::config_error, "key '" + key + "': expected an integer");
  return i;
}

int Config::get_int(const std::string& key, int fallback) const {
  return has(key) ? get_int(key) : fallback;
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t fallback) const {
  if (!has(key)) return fallback;
  const std::string v = get_string(key);
  char* end = nullptr;
  const unsigned long long x = std::strtoull(v.c_str(), &end, 10);
  if (end != v.c_str() + v.size() || v.empty())
    raise(Errc::config_error, "key '" + key + "': expected an unsigned integer");
  return x;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string v = get_string(key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  raise(Errc::config_error, "key '" + key + "': expected true/false");
}

std::vector<double> Config::get_doubles(const std::string& key) const {
  const std::string v = get_string(key);
  std::vector<double> out;
  std::istringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    char* end = nullptr;
    const double x = std::strtod(item.c_str(), &end);
    if (end != item.c_str() + item.size() || item.empty())
      raise(Errc::config_error, "key '" + key + "': bad list element '" + item + "'");
    out.push_back(x);
  }
  if (out.empty()) raise(Errc::config_error, "key '" + key + "': empty list");
  return out;
}

std::vector<double> Config::get_doubles(const std::string& key,
                                        const std::vector<double>& fallback) const {
  return has(key) ? get_doubles(key) : fallback;
}

std::vector<int> Config::get_ints(const std::string& key, const std::vector<int>& fallback) const {
  if (!has(key)) return fallback;
  std::vector<int> out;
  for (double x : get_doubles(key)) {
    const int i = static_cast<int>(x);
    if (static_cast<double>(i) != x)
      raise(Errc::config_error, "key '" + key + "': expected integers");
    out.push_back(i);
  }
  return out;
}

RegimeType parse_regime_type(const std::string& s) {
  if (s == "I" || s == "1") return RegimeType::I;
  if (s == "II" || s == "2") return RegimeType::II;
  if (s == "III" || s == "3") return RegimeType::III;
  if (s == "IV" || s == "4") return RegimeType::IV;
  raise(Errc::config_error, "regime_type must be one of I, II, III, IV");
}

std::string regime_type_name(RegimeType t) {
  switch (t) {
    case RegimeType::I: return "I";
    case RegimeType::II: return "II";
    case RegimeType::III: return "III";
    case RegimeType::IV: return "IV";
  }
  return "?";
}

void PriorSpec::finalize(int m) {
  const auto fill = [m](VectorXd& v, double value) {
    if (v.size() == 0) v = VectorXd::Constant(m, value);
  };
  if (w_u == 0.0) w_u = m + 2;
  if (w_v == 0.0) w_v = m + 2;
  if (w_w == 0.0) w_w = m + 2;
  if (phi == 0.0) phi = m + 2;
  fill(W_u, 0.01);
  fill(W_v, 0.01);
  fill(W_w, 0.01);
  fill(nu, 0.01);
}

void PriorSpec::validate(int m) const {
  if (!(h > 0.0 && h < 1.0 / 3.0)) raise(Errc::config_error, "h must lie in (0, 1/3)");
  if (!(c_star > 0.0 && c_star < 1.0)) raise(Errc::config_error, "c_star must lie in (0, 1)");
  const double min_dof = static_cast<double>(m - 1);
  for (double w : {w_u, w_v, w_w, phi})
    if (!(w > min_dof)) raise(Errc::config_error, "inverse-Wishart dof must exceed m - 1");
  if (!(psi > 0.0)) raise(Errc::config_error, "psi must be positive");
}

void McmcSpec::validate() const {
  if (n_iter < 0) raise(Errc::config_error, "n_iter must be non-negative");
  if (burn_in < 0 || (n_iter > 0 && burn_in >= n_iter))
    raise(Errc::config_error, "burn_in must be smaller than n_iter");
  if (!(rw_scale > 0.0)) raise(Errc::config_error, "rw_scale must be positive");
  if (report_thin < 1) raise(Errc::config_error, "report_thin must be at least 1");
}

void ModelSpec::finalize() {
  if (m <= 0) raise(Errc::config_error, "m must be positive");
  if (seasonal_periods.empty()) seasonal_periods.assign(static_cast<std::size_t>(m), 4);
  if (trend_rho.size() == 0) trend_rho = VectorXd::Constant(m, 0.5);
  if (trend_d.size() == 0) trend_d = VectorXd::Zero(m);
  if (cycle_zeta.size() == 0) cycle_zeta = VectorXd::Constant(m, 0.9);
  if (cycle_lambda.size() == 0) cycle_lambda = VectorXd::Constant(m, 2.0 * M_PI / 20.0);
  prior.finalize(m);
  if (prior.p_expected.size() == 0)
    prior.p_expected = VectorXd::Constant(m, predictors_per_asset() / 2.0);
}

void ModelSpec::validate() const {
  if (m <= 0) raise(Errc::config_error, "m must be positive");
  if (lag_order < 1) raise(Errc::config_error, "lag_order must be at least 1");
  if (!(k_star >= 0.5 && k_star <= 1.0)) raise(Errc::config_error, "k_star must lie in [0.5, 1]");
  if (static_cast<int>(seasonal_periods.size()) != m)
    raise(Errc::config_error, "need one seasonal period per series");
  for (int s : seasonal_periods)
    if (s < 2) raise(Errc::config_error, "seasonal periods must be at least 2");
  if (regime_init != 0 && regime_init != 1)
    raise(Errc::config_error, "regime_init must be 0 or 1");
  for (Eigen::Index i = 0; i < trend_rho.size(); ++i)
    if (!(trend_rho[i] > 0.0 && trend_rho[i] < 1.0))
      raise(Errc::config_error, "trend rho entries must lie in (0, 1)");
  prior.validate(m);
  mcmc.validate();
}

ModelSpec ModelSpec::from_config(const Config& cfg) {
  ModelSpec spec;
  spec.m = cfg.get_int("m");
  spec.lag_order = cfg.get_int("lag_order", spec.lag_order);
  spec.regime_type = parse_regime_type(cfg.get_string("regime_type", "I"));
  spec.regime_enabled = cfg.get_bool("regime_enabled", true);
  spec.k_star = cfg.get_double("k_star", spec.k_star);
  spec.seasonal_periods = cfg.get_ints("seasonal_periods", {});
  spec.cyclical_enabled = cfg.get_bool("cyclical_enabled", false);
  spec.use_garch = cfg.get_bool("use_garch", true);
  spec.cross_lags = cfg.get_bool("cross_lags", false);
  spec.regime_init = cfg.get_int("regime_init", 0);
  if (cfg.has("rho")) {
    const auto v = cfg.get_doubles("rho");
    spec.trend_rho = Eigen::Map<const VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
  }
  if (cfg.has("trend_d")) {
    const auto v = cfg.get_doubles("trend_d");
    spec.trend_d = Eigen::Map<const VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
  }
  spec.seed = cfg.get_u64("seed", 0);

  PriorSpec& pr = spec.prior;
  pr.h = cfg.get_double("h", pr.h);
  pr.c_star = cfg.get_double("c_star", pr.c_star);
  pr.w_u = cfg.get_double("w_u", 0.0);
  pr.w_v = cfg.get_double("w_v", 0.0);
  pr.w_w = cfg.get_double("w_w", 0.0);
  pr.phi = cfg.get_double("phi", 0.0);
  const auto diag = [&](const char* key) -> VectorXd {
    if (!cfg.has(key)) return VectorXd();
    const auto v = cfg.get_doubles(key);
    if (v.size() == 1) return VectorXd::Constant(spec.m, v[0]);
    return Eigen::Map<const VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
  };
  pr.W_u = diag("scale_u");
  pr.W_v = diag("scale_v");
  pr.W_w = diag("scale_w");
  pr.nu = diag("nu");
  pr.psi = cfg.get_double("psi", pr.psi);
  pr.c_gamma = cfg.get_double("c_gamma", pr.c_gamma);
  pr.p_expected = diag("p_expected");

  McmcSpec& mc = spec.mcmc;
  mc.n_iter = cfg.get_int("n_iter", mc.n_iter);
  mc.burn_in = cfg.get_int("burn_in", mc.burn_in);
  mc.rw_scale = cfg.get_double("rw_scale", mc.rw_scale);
  mc.report_thin = cfg.get_int("report_thin", mc.report_thin);

  spec.finalize();
  spec.validate();
  return spec;
}

}  // namespace shmbs

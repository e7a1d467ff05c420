// command-line front end: simulate / score / fit / backtest / zones

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

#include "shmbs/csv.hpp"
#include "shmbs/harness.hpp"
#include "shmbs/inference.hpp"
#include "shmbs/jsonout.hpp"
#include "shmbs/simulate.hpp"
#include "shmbs/softinfo.hpp"

namespace {

using namespace shmbs;

std::vector<Date> synthetic_index(int n) {
  std::vector<Date> idx;
  Date d = make_date(2016, 1, 4);
  while (static_cast<int>(idx.size()) < n) {
    // weekdays only, resembling a trading calendar
    const int dow = ((d.serial % 7) + 7) % 7;  // 1970-01-01 was a Thursday (dow 4... serial 0)
    const int weekday = (dow + 4) % 7;         // 0 = Sunday
    if (weekday != 0 && weekday != 6) idx.push_back(d);
    d = d.next();
  }
  return idx;
}

SimConfig sim_config_from(const Config& cfg) {
  SimConfig sc = SimConfig::table_defaults();
  sc.n = cfg.get_int("n", sc.n);
  const auto row = [&](const char* key, int r, MatrixXd& target) {
    if (!cfg.has(key)) return;
    const auto v = cfg.get_doubles(key);
    if (static_cast<int>(v.size()) != target.cols())
      raise(Errc::config_error, std::string("key '") + key + "' needs 3 values");
    for (int j = 0; j < target.cols(); ++j) target(r, j) = v[static_cast<std::size_t>(j)];
  };
  row("phi_1", 0, sc.phi);
  row("phi_2", 1, sc.phi);
  row("phi_3", 2, sc.phi);
  row("beta0_1", 0, sc.beta0);
  row("beta0_2", 1, sc.beta0);
  row("beta0_3", 2, sc.beta0);
  row("beta1_1", 0, sc.beta1);
  row("beta1_2", 1, sc.beta1);
  row("beta1_3", 2, sc.beta1);
  if (cfg.has("sigma2_driver")) {
    const auto v = cfg.get_doubles("sigma2_driver");
    sc.sigma2_driver = Eigen::Map<const VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
  }
  sc.sigma2_u = cfg.get_double("sigma2_u", sc.sigma2_u);
  sc.sigma2_v = cfg.get_double("sigma2_v", sc.sigma2_v);
  sc.sigma2_w = cfg.get_double("sigma2_w", sc.sigma2_w);
  sc.sigma2_eps = cfg.get_double("sigma2_eps", sc.sigma2_eps);
  if (cfg.has("rho_true")) {
    const auto v = cfg.get_doubles("rho_true");
    sc.rho_true = Eigen::Map<const VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
  }
  sc.s_true = cfg.get_ints("s_true", sc.s_true);
  sc.q_L = cfg.get_double("q_l", sc.q_L);
  sc.q_U = cfg.get_double("q_u", sc.q_U);
  sc.k_star = cfg.get_double("k_star", sc.k_star);
  return sc;
}

MultiSeries to_series(const MatrixXd& values, const std::vector<Date>& idx,
                      const std::string& prefix) {
  MultiSeries s;
  s.index = idx;
  s.values = values;
  for (Eigen::Index j = 0; j < values.cols(); ++j)
    s.names.push_back(prefix + std::to_string(j + 1));
  return s;
}

int cmd_simulate(const Config& cfg, std::uint64_t seed, const std::string& out_dir) {
  const SimConfig sc = sim_config_from(cfg);
  Rng rng(seed);
  const MatrixXd x = gen_ar3(sc, rng);
  const RegimeSimPath regimes = gen_regimes(x, sc.q_L, sc.q_U, sc.k_star);
  LatentTruth truth;
  const MatrixXd y = gen_observations(sc, x, regimes.global, rng, &truth);

  const auto idx = synthetic_index(sc.n);
  std::filesystem::create_directories(out_dir);
  write_series(out_dir + "/x.csv", to_series(x, idx, "x"));
  write_series(out_dir + "/y.csv", to_series(y, idx, "y"));

  MatrixXd reg(sc.n, sc.m + 1);
  reg.leftCols(sc.m) = regimes.per_asset.cast<double>().matrix();
  reg.col(sc.m) = regimes.global.cast<double>().matrix();
  MultiSeries regs = to_series(reg, idx, "r");
  regs.names.back() = "r_global";
  write_series(out_dir + "/regimes.csv", regs);

  MatrixXd tr(sc.n, 4 * sc.m);
  tr << truth.mu, truth.delta, truth.kappa, truth.xi;
  MultiSeries truths;
  truths.index = idx;
  truths.values = tr;
  for (const char* base : {"mu_", "delta_", "kappa_", "xi_"})
    for (int j = 1; j <= sc.m; ++j) truths.names.push_back(base + std::to_string(j));
  write_series(out_dir + "/truth.csv", truths);
  std::cout << "wrote " << out_dir << "/{x,y,regimes,truth}.csv (n=" << sc.n << ")\n";
  return 0;
}

int cmd_score(const Config& cfg, const std::string& out_dir) {
  const Lexicon lex = Lexicon::load(cfg.get_string("lexicon_file"));
  const auto docs = load_corpus(cfg.get_string("corpus_file"));

  std::vector<std::vector<std::string>> watchlists;
  for (int i = 1;; ++i) {
    const std::string key = "watchlist_" + std::to_string(i);
    if (!cfg.has(key)) break;
    std::vector<std::string> items;
    std::istringstream ss(cfg.get_string(key));
    std::string item;
    while (std::getline(ss, item, ',')) items.push_back(item);
    watchlists.push_back(items);
  }
  if (watchlists.empty()) raise(Errc::config_error, "need at least watchlist_1");

  SoftScoreSeries scores = score_corpus(docs, watchlists, lex);
  if (cfg.has("epu_file")) {
    const MultiSeries epu = load_series(cfg.get_string("epu_file"));
    // align by date; EPU days missing from the corpus index are skipped
    std::map<Date, double> lookup;
    for (Eigen::Index t = 0; t < epu.rows(); ++t)
      lookup[epu.index[static_cast<std::size_t>(t)]] = epu.values(t, 0);
    for (Eigen::Index t = 0; t < scores.rows(); ++t) {
      const auto it = lookup.find(scores.index[static_cast<std::size_t>(t)]);
      if (it == lookup.end())
        raise(Errc::coverage_gap,
              "no EPU value for " + format_date(scores.index[static_cast<std::size_t>(t)]));
      scores.d1[t] = it->second;
    }
  }

  std::filesystem::create_directories(out_dir);
  std::vector<std::string> names;
  for (std::size_t i = 0; i < watchlists.size(); ++i) names.push_back(std::to_string(i + 1));
  write_soft_scores(out_dir + "/soft.csv", scores, names);
  std::cout << "wrote " << out_dir << "/soft.csv (" << scores.rows() << " days, "
            << watchlists.size() << " assets)\n";
  return 0;
}

struct LoadedData {
  MultiSeries y;
  MatrixXd driver;
  bool has_driver = false;
  SoftScoreSeries soft;
  bool has_soft = false;
};

LoadedData load_inputs(const Config& cfg) {
  LoadedData d;
  d.y = load_series(cfg.get_string("data_file"));
  if (cfg.has("driver_file")) {
    const MultiSeries drv = load_series(cfg.get_string("driver_file"));
    if (drv.rows() != d.y.rows()) raise(Errc::misaligned_index, "driver rows != data rows");
    d.driver = drv.values;
    d.has_driver = true;
  }
  if (cfg.has("soft_file")) {
    d.soft = load_soft_scores(cfg.get_string("soft_file"));
    d.soft = align_soft_scores(d.soft, d.y.index);
    d.has_soft = true;
  }
  return d;
}

int cmd_fit(const Config& cfg, std::uint64_t seed, const std::string& out_dir) {
  ModelSpec spec = ModelSpec::from_config(cfg);
  LoadedData data = load_inputs(cfg);
  if (spec.m != static_cast<int>(data.y.cols()))
    raise(Errc::config_error, "m does not match the data file");

  MatrixXd driver = data.has_driver ? data.driver : data.y.values;
  if (spec.use_garch) driver = degarch_panel(driver).values;

  MatrixXd soft;
  if (data.has_soft) {
    const SoftScoreSeries norm = normalize_and_combine(data.soft, 0, data.soft.rows());
    soft = norm.dt;
  } else if (spec.regime_type != RegimeType::I) {
    raise(Errc::config_error, "regime types II-IV need soft_file");
  }

  const RegimeInputs inputs = RegimeInputs::make(spec, driver, soft);
  Rng rng(seed);
  PosteriorDraws draws = run_mcmc(spec, data.y.values, inputs, rng);
  draws.seed = seed;

  std::filesystem::create_directories(out_dir);
  write_draws_csv(out_dir + "/draws.csv", draws);
  write_summary_json(out_dir + "/summary.json", spec, draws);
  std::cout << "wrote " << out_dir << "/draws.csv and summary.json\n";
  return 0;
}

int cmd_backtest(const Config& cfg, std::uint64_t seed, const std::string& out_dir) {
  ModelSpec spec = ModelSpec::from_config(cfg);
  LoadedData data = load_inputs(cfg);
  BacktestConfig bt;
  bt.window = cfg.get_int("window", bt.window);
  bt.step = cfg.get_int("step", bt.step);
  bt.model = parse_backtest_model(cfg.get_string("model", "shmbs"));
  bt.parallel_windows = cfg.get_bool("parallel_windows", false);

  MatrixXd soft_panel;
  const SoftScoreSeries* soft = nullptr;
  if (data.has_soft) soft = &data.soft;
  else if (spec.regime_type != RegimeType::I && bt.model == BacktestModel::shmbs)
    raise(Errc::config_error, "regime types II-IV need soft_file");

  const MatrixXd* driver = data.has_driver ? &data.driver : nullptr;
  const BacktestReport report = rolling_backtest(spec, bt, data.y, driver, soft, seed);

  std::filesystem::create_directories(out_dir);
  write_report_json(out_dir + "/report.json", report);
  write_metrics_csv(out_dir + "/metrics.csv", report);
  write_timing_csv(out_dir + "/timing.csv", report);
  std::cout << "wrote " << out_dir << "/report.json and metrics.csv ("
            << report.windows.size() << " windows)\n";
  (void)soft_panel;
  return 0;
}

int cmd_zones(const Config& cfg, const std::string& out_dir) {
  RegimeThresholds thr;
  thr.tau_h_L = VectorXd::Constant(1, cfg.get_double("tau_h_l", -0.4));
  thr.tau_h_U = VectorXd::Constant(1, cfg.get_double("tau_h_u", 0.4));
  thr.tau_s_L = VectorXd::Constant(1, cfg.get_double("tau_s_l", -0.4));
  thr.tau_s_U = VectorXd::Constant(1, cfg.get_double("tau_s_u", 0.4));
  const double lo = cfg.get_double("grid_min", -2.0);
  const double hi = cfg.get_double("grid_max", 2.0);
  const int gn = cfg.get_int("grid_n", 101);
  std::filesystem::create_directories(out_dir);
  write_zone_grid(out_dir + "/zones.csv", thr, lo, hi, gn);
  std::cout << "wrote " << out_dir << "/zones.csv\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hysteretic multivariate structural time-series toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".";
  std::uint64_t seed = 0;
  bool seed_set = false;

  const auto add_common = [&](CLI::App* sub, bool needs_config = true) {
    auto* opt = sub->add_option("--config", config_path, "flat key=value config file");
    if (needs_config) opt->required();
    sub->add_option("--seed", seed, "random seed (overrides config)")->each([&](const std::string&) {
      seed_set = true;
    });
    sub->add_option("--out", out_dir, "output directory (default .)");
  };

  auto* sim = app.add_subcommand("simulate", "write synthetic fixture CSVs");
  auto* score = app.add_subcommand("score", "run the sentiment pipeline over a corpus");
  auto* fit = app.add_subcommand("fit", "single-window estimation");
  auto* backtest = app.add_subcommand("backtest", "rolling-window evaluation");
  auto* zones = app.add_subcommand("zones", "export zone-classification grids");
  for (auto* sub : {sim, score, fit, backtest, zones}) add_common(sub);

  CLI11_PARSE(app, argc, argv);

  try {
    shmbs::Config cfg = shmbs::Config::parse_file(config_path);
    const std::uint64_t eff_seed = seed_set ? seed : cfg.get_u64("seed", 0);
    if (sim->parsed()) return cmd_simulate(cfg, eff_seed, out_dir);
    if (score->parsed()) return cmd_score(cfg, out_dir);
    if (fit->parsed()) return cmd_fit(cfg, eff_seed, out_dir);
    if (backtest->parsed()) return cmd_backtest(cfg, eff_seed, out_dir);
    if (zones->parsed()) return cmd_zones(cfg, out_dir);
  } catch (const shmbs::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code() == shmbs::Errc::config_error || e.code() == shmbs::Errc::io_error ||
                   e.code() == shmbs::Errc::missing_column
               ? 2
               : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

// exercises the installed binary end to end via std::system
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace {

int run(const std::string& args) {
  const int rc = std::system((std::string(SHMBS_CLI_PATH) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

void put(const std::string& path, const std::string& content) {
  std::ofstream f(path);
  f << content;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("missing config file exits 2") {
  CHECK(run("fit --config ./definitely_missing.cfg") == 2);
}

TEST_CASE("unknown config key exits 2") {
  put("./cli_bad.cfg", "m = 2\nbogus_key = 1\n");
  CHECK(run("fit --config ./cli_bad.cfg") == 2);
  std::remove("./cli_bad.cfg");
}

TEST_CASE("simulate is deterministic for a fixed seed") {
  put("./cli_sim.cfg", "n = 80\n");
  CHECK(run("simulate --config ./cli_sim.cfg --seed 7 --out ./cli_out_a") == 0);
  CHECK(run("simulate --config ./cli_sim.cfg --seed 7 --out ./cli_out_b") == 0);
  for (const char* f : {"x.csv", "y.csv", "regimes.csv", "truth.csv"}) {
    CHECK(slurp(std::string("./cli_out_a/") + f) == slurp(std::string("./cli_out_b/") + f));
  }
  // a different seed changes the data
  CHECK(run("simulate --config ./cli_sim.cfg --seed 8 --out ./cli_out_c") == 0);
  CHECK(slurp("./cli_out_a/y.csv") != slurp("./cli_out_c/y.csv"));
  std::system("rm -rf ./cli_out_a ./cli_out_b ./cli_out_c ./cli_sim.cfg");
}

TEST_CASE("zones subcommand writes the grid") {
  put("./cli_zones.cfg", "tau_h_l = -0.4\ntau_h_u = 0.4\ntau_s_l = -0.3\ntau_s_u = 0.3\ngrid_n = 21\n");
  CHECK(run("zones --config ./cli_zones.cfg --out ./cli_zones_out") == 0);
  const std::string content = slurp("./cli_zones_out/zones.csv");
  CHECK(content.rfind("type,r,d,zone", 0) == 0);
  std::system("rm -rf ./cli_zones_out ./cli_zones.cfg");
}

TEST_CASE("score subcommand runs the pipeline over a small corpus") {
  put("./cli_lex.tsv", "good\t0.5\tadjective\nbad\t-0.5\tadjective\n");
  put("./cli_corpus.csv",
      "date,text\n"
      "2020-01-02,ACME good. BETA bad.\n"
      "2020-01-03,ACME bad. BETA good.\n");
  put("./cli_score.cfg",
      "lexicon_file = ./cli_lex.tsv\n"
      "corpus_file = ./cli_corpus.csv\n"
      "watchlist_1 = acme\n"
      "watchlist_2 = beta\n");
  CHECK(run("score --config ./cli_score.cfg --out ./cli_score_out") == 0);
  const std::string soft = slurp("./cli_score_out/soft.csv");
  CHECK(soft.rfind("date,d1,d2_1,d2_2", 0) == 0);
  std::system("rm -rf ./cli_score_out ./cli_lex.tsv ./cli_corpus.csv ./cli_score.cfg");
}

TEST_CASE("simulate then fit then backtest round trip") {
  put("./cli_rt.cfg",
      "n = 70\n"
      "m = 3\n"
      "use_garch = false\n"
      "n_iter = 12\n"
      "burn_in = 4\n"
      "lag_order = 3\n"
      "data_file = ./cli_rt_out/y.csv\n"
      "driver_file = ./cli_rt_out/x.csv\n"
      "window = 50\n"
      "step = 10\n");
  CHECK(run("simulate --config ./cli_rt.cfg --seed 3 --out ./cli_rt_out") == 0);
  CHECK(run("fit --config ./cli_rt.cfg --seed 3 --out ./cli_rt_fit") == 0);
  CHECK(slurp("./cli_rt_fit/draws.csv").rfind("iter,name,value", 0) == 0);
  CHECK(slurp("./cli_rt_fit/summary.json").find("\"beta_mean\"") != std::string::npos);
  CHECK(run("backtest --config ./cli_rt.cfg --seed 3 --out ./cli_rt_bt") == 0);
  CHECK(slurp("./cli_rt_bt/report.json").find("\"n_windows\":2") != std::string::npos);
  CHECK(slurp("./cli_rt_bt/metrics.csv").rfind("window,asset,metric,value", 0) == 0);
  std::system("rm -rf ./cli_rt_out ./cli_rt_fit ./cli_rt_bt ./cli_rt.cfg");
}

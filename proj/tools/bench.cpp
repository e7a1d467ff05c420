// serial vs OpenMP kernel comparison

#include <benchmark/benchmark.h>

#include "shmbs/likelihood.hpp"
#include "shmbs/rng.hpp"
#include "shmbs/softinfo.hpp"
#include "shmbs/statespace.hpp"

namespace {

using namespace shmbs;

struct LikelihoodFixture {
  MatrixXd resid0, resid1, Sigma;
  ArrayXi regime;

  explicit LikelihoodFixture(int n, int m) {
    Rng rng(42);
    resid0.resize(n, m);
    resid1.resize(n, m);
    regime.resize(n);
    for (int t = 0; t < n; ++t) {
      for (int i = 0; i < m; ++i) {
        resid0(t, i) = rng.normal();
        resid1(t, i) = rng.normal();
      }
      regime[t] = rng.uniform01() < 0.5 ? 1 : 0;
    }
    MatrixXd A(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) A(i, j) = rng.normal();
    Sigma = A * A.transpose() + static_cast<double>(m) * MatrixXd::Identity(m, m);
  }
};

void BM_regime_loglik_serial(benchmark::State& state) {
  const LikelihoodFixture fx(static_cast<int>(state.range(0)), 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        regime_loglik_serial(fx.resid0, fx.resid1, fx.regime, fx.Sigma));
  }
}

void BM_regime_loglik_omp(benchmark::State& state) {
  const LikelihoodFixture fx(static_cast<int>(state.range(0)), 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(regime_loglik(fx.resid0, fx.resid1, fx.regime, fx.Sigma));
  }
}

std::vector<CorpusDoc> make_corpus(int n_docs) {
  std::vector<CorpusDoc> docs;
  Rng rng(7);
  const char* words[] = {"acme", "rose", "fell",  "strongly", "profit", "loss",
                         "not",  "good", "weak",  "gains",    "slump",  "rally"};
  for (int k = 0; k < n_docs; ++k) {
    std::string text;
    for (int s = 0; s < 6; ++s) {
      text += "acme";
      for (int w = 0; w < 12; ++w)
        text += std::string(" ") + words[rng.raw() % (sizeof(words) / sizeof(words[0]))];
      text += ". ";
    }
    docs.push_back({make_date(2020, 1, 1 + k % 28), text});
  }
  return docs;
}

Lexicon make_lexicon() {
  Lexicon lex;
  lex.add("rose", 0.5, PosClass::verb);
  lex.add("fell", -0.5, PosClass::verb);
  lex.add("profit", 0.6, PosClass::other);
  lex.add("loss", -0.6, PosClass::other);
  lex.add("good", 0.7, PosClass::adjective);
  lex.add("weak", -0.4, PosClass::adjective);
  lex.add("gains", 0.5, PosClass::other);
  lex.add("slump", -0.7, PosClass::other);
  lex.add("rally", 0.6, PosClass::other);
  return lex;
}

void BM_score_corpus_serial(benchmark::State& state) {
  const auto docs = make_corpus(static_cast<int>(state.range(0)));
  const auto lex = make_lexicon();
  const std::vector<std::vector<std::string>> watch = {{"acme"}};
  for (auto _ : state) {
    benchmark::DoNotOptimize(score_corpus(docs, watch, lex, /*serial=*/true));
  }
}

void BM_score_corpus_omp(benchmark::State& state) {
  const auto docs = make_corpus(static_cast<int>(state.range(0)));
  const auto lex = make_lexicon();
  const std::vector<std::vector<std::string>> watch = {{"acme"}};
  for (auto _ : state) {
    benchmark::DoNotOptimize(score_corpus(docs, watch, lex, /*serial=*/false));
  }
}

void BM_simulation_smoother(benchmark::State& state) {
  ModelSpec spec;
  spec.m = 3;
  spec.finalize();
  spec.mcmc.n_iter = 1;
  const MbsComponents comps = MbsComponents::defaults(spec);
  const StateSpaceModel model = assemble(spec, comps);
  Rng rng(11);
  const int n = static_cast<int>(state.range(0));
  MatrixXd y(n, 3);
  for (int t = 0; t < n; ++t)
    for (int i = 0; i < 3; ++i) y(t, i) = rng.normal();
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulation_smoother(model, y, rng));
  }
}

}  // namespace

BENCHMARK(BM_regime_loglik_serial)->Arg(500)->Arg(5000)->Arg(50000);
BENCHMARK(BM_regime_loglik_omp)->Arg(500)->Arg(5000)->Arg(50000);
BENCHMARK(BM_score_corpus_serial)->Arg(64)->Arg(512);
BENCHMARK(BM_score_corpus_omp)->Arg(64)->Arg(512);
BENCHMARK(BM_simulation_smoother)->Arg(252)->Arg(500);

BENCHMARK_MAIN();

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "shmbs/regime.hpp"
#include "shmbs/rng.hpp"

using namespace shmbs;

namespace {

RegimeThresholds sym_thr(int m, double hL, double hU, double sL, double sU) {
  RegimeThresholds thr;
  thr.tau_h_L = VectorXd::Constant(m, hL);
  thr.tau_h_U = VectorXd::Constant(m, hU);
  thr.tau_s_L = VectorXd::Constant(m, sL);
  thr.tau_s_U = VectorXd::Constant(m, sU);
  return thr;
}

int count_hysteresis_steps(const VectorXd& x, double tau_L, double tau_U) {
  int carries = 0;
  for (Eigen::Index t = 1; t < x.size(); ++t)
    if (classify_zone(RegimeType::I, x[t - 1], 0.0, tau_L, tau_U, 0.0, 0.0) == Zone::hysteresis)
      ++carries;
  return carries;
}

}  // namespace

TEST_CASE("type I hand trace") {
  MatrixXd r(5, 1);
  r << -1.0, 0.0, 1.0, 0.0, -1.0;
  const auto thr = sym_thr(1, -0.5, 0.5, 0, 0);
  const ArrayXXi path = indicator_path(RegimeType::I, r, MatrixXd(), thr, 0);
  const int want[5] = {0, 1, 1, 0, 0};
  for (int t = 0; t < 5; ++t) CHECK(path(t, 0) == want[t]);
}

TEST_CASE("type I with equal thresholds reduces to the TAR indicator on continuous data") {
  Rng rng(11);
  MatrixXd r(200, 1);
  for (int t = 0; t < 200; ++t) r(t, 0) = rng.normal();
  const double tau = 0.1234;  // never hit exactly by continuous draws
  const auto thr = sym_thr(1, tau, tau, 0, 0);
  const ArrayXXi path = indicator_path(RegimeType::I, r, MatrixXd(), thr, 0);
  for (int t = 1; t < 200; ++t) CHECK(path(t, 0) == (r(t - 1, 0) < tau ? 1 : 0));
}

TEST_CASE("classic hard indicator with equal thresholds is total (no carry-over)") {
  VectorXd x(4);
  x << 0.5, 0.5, 1.0, 0.0;  // x_1 == tau exactly
  const ArrayXi path = har_indicator(x, 0.5, 0.5, 0);
  CHECK(path[0] == 0);
  CHECK(path[1] == 1);  // x <= tau_L
  CHECK(path[2] == 1);
  CHECK(path[3] == 0);  // x > tau_U
}

TEST_CASE("type IV depends only on soft information") {
  Rng rng(5);
  const int n = 50;
  MatrixXd r(n, 2), rperm(n, 2), soft(n, 2);
  for (int t = 0; t < n; ++t)
    for (int i = 0; i < 2; ++i) {
      r(t, i) = rng.normal();
      soft(t, i) = rng.normal();
    }
  for (int t = 0; t < n; ++t) rperm.row(t) = r.row(n - 1 - t);  // permuted driver
  const auto thr = sym_thr(2, -0.3, 0.3, -0.4, 0.4);
  const ArrayXXi p1 = indicator_path(RegimeType::IV, r, soft, thr, 0);
  const ArrayXXi p2 = indicator_path(RegimeType::IV, rperm, soft, thr, 0);
  CHECK((p1 == p2).all());
}

TEST_CASE("zone classification boundary conventions") {
  const double hL = -0.4, hU = 0.4, sL = -0.3, sU = 0.3;
  // type III set A admits the non-strict boundary
  CHECK(classify_zone(RegimeType::III, hL, sU, hL, hU, sL, sU) == Zone::regime1);
  CHECK(classify_zone(RegimeType::III, -1.0, 0.1, hL, hU, sL, sU) == Zone::regime1);
  // type II: conflicting hard/soft signals sit in the hysteresis zone
  CHECK(classify_zone(RegimeType::II, -1.0, 1.0, hL, hU, sL, sU) == Zone::hysteresis);
  CHECK(classify_zone(RegimeType::II, -1.0, 0.0, hL, hU, sL, sU) == Zone::regime1);
  // type I boundaries are strict on both sides
  CHECK(classify_zone(RegimeType::I, hU, 0.0, hL, hU, sL, sU) == Zone::hysteresis);
  CHECK(classify_zone(RegimeType::I, hL, 0.0, hL, hU, sL, sU) == Zone::hysteresis);
  // type IV: regime 1 boundary is non-strict, regime 0 strict
  CHECK(classify_zone(RegimeType::IV, 0.0, sL, hL, hU, sL, sU) == Zone::regime1);
  CHECK(classify_zone(RegimeType::IV, 0.0, sU, hL, hU, sL, sU) == Zone::hysteresis);
  CHECK(classify_zone(RegimeType::IV, 0.0, sU + 1e-12, hL, hU, sL, sU) == Zone::regime0);
}

TEST_CASE("aggregate: two-thirds rule") {
  ArrayXXi pa(1, 3);
  pa << 1, 1, 0;
  CHECK(aggregate(pa, 2.0 / 3.0, 0)[0] == 1);
  pa << 0, 0, 0;
  CHECK(aggregate(pa, 2.0 / 3.0, 0)[0] == 0);
  CHECK(aggregate(pa, 0.5, 1)[0] == 0);
  CHECK(aggregate(pa, 1.0, 1)[0] == 0);
  // (1,0,0): one 1 < 2 needed, two 0s >= 2 -> regime 0
  pa << 1, 0, 0;
  CHECK(aggregate(pa, 2.0 / 3.0, 1)[0] == 0);
}

TEST_CASE("aggregate carries the previous value when neither side reaches k* m") {
  ArrayXXi pa(3, 3);
  pa << 1, 1, 1,   // -> 1
       1, 0, 0,    // zeros = 2 >= 2 -> 0
       1, 1, 0;    // ones = 2 -> 1
  const ArrayXi g = aggregate(pa, 2.0 / 3.0, 0);
  CHECK(g[0] == 1);
  CHECK(g[1] == 0);
  CHECK(g[2] == 1);

  // k* = 0.9: both sums below 2.7 except unanimity; carries persist
  ArrayXXi pb(3, 3);
  pb << 1, 1, 1,
        1, 1, 0,
        0, 0, 1;
  const ArrayXi gb = aggregate(pb, 0.9, 0);
  CHECK(gb[0] == 1);
  CHECK(gb[1] == 1);
  CHECK(gb[2] == 1);
}

TEST_CASE("aggregate tie resolves to regime 1") {
  ArrayXXi pa(1, 2);
  pa << 1, 0;  // k* = 0.5, m = 2: both counts reach 1
  CHECK(aggregate(pa, 0.5, 0)[0] == 1);
}

TEST_CASE("aggregate with one asset reduces to the per-asset path") {
  Rng rng(9);
  ArrayXXi pa(100, 1);
  for (int t = 0; t < 100; ++t) pa(t, 0) = rng.uniform01() < 0.5 ? 1 : 0;
  for (double k : {0.5, 0.7, 1.0}) {
    const ArrayXi g = aggregate(pa, k, 0);
    CHECK((g == pa.col(0)).all());
  }
}

TEST_CASE("hysteresis zones nest across types on a grid") {
  const double hL = -0.4, hU = 0.4, sL = -0.3, sU = 0.3;
  int n_checked = 0;
  for (int a = 0; a < 100; ++a) {
    for (int b = 0; b < 100; ++b) {
      const double r = -1.0 + 2.0 * a / 99.0;
      const double d = -1.0 + 2.0 * b / 99.0;
      const Zone z1 = classify_zone(RegimeType::I, r, d, hL, hU, sL, sU);
      const Zone z2 = classify_zone(RegimeType::II, r, d, hL, hU, sL, sU);
      const Zone z3 = classify_zone(RegimeType::III, r, d, hL, hU, sL, sU);
      // type II hysteresis contains type I hysteresis
      if (z1 == Zone::hysteresis) REQUIRE(z2 == Zone::hysteresis);
      // type III non-hysteresis zones contain type II's, side by side
      if (z2 == Zone::regime1) REQUIRE(z3 == Zone::regime1);
      if (z2 == Zone::regime0) REQUIRE(z3 == Zone::regime0);
      ++n_checked;
    }
  }
  CHECK(n_checked == 10000);
}

TEST_CASE("enlarging the hysteresis band never reduces carry-over steps") {
  Rng rng(31);
  VectorXd x(300);
  for (int t = 0; t < 300; ++t) x[t] = rng.normal();
  int prev = 0;
  for (double width = 0.0; width < 2.0; width += 0.1) {
    const int carries = count_hysteresis_steps(x, -width / 2, width / 2);
    CHECK(carries >= prev);
    prev = carries;
  }
}

TEST_CASE("misaligned soft panel is rejected") {
  MatrixXd r(5, 2);
  r.setZero();
  MatrixXd soft(4, 2);
  soft.setZero();
  const auto thr = sym_thr(2, -1, 1, -1, 1);
  CHECK_THROWS_WITH_AS(indicator_path(RegimeType::II, r, soft, thr, 0),
                       doctest::Contains("MisalignedIndex"), Error);
  CHECK_THROWS_AS(indicator_path(RegimeType::I, r, MatrixXd(), sym_thr(1, -1, 1, 0, 0), 0),
                  Error);
}

TEST_CASE("zone grid export writes one row per type and cell") {
  const auto thr = sym_thr(1, -0.4, 0.4, -0.4, 0.4);
  const std::string path = "./zones_test.csv";
  write_zone_grid(path, thr, -2.0, 2.0, 11);
  std::ifstream in(path);
  REQUIRE(in.good());
  std::string line;
  int rows = 0;
  std::getline(in, line);
  CHECK(line == "type,r,d,zone");
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 4 * 11 * 11);
  std::remove(path.c_str());
}

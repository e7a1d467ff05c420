#include "shmbs/common.hpp"

#include <algorithm>
#include <cmath>

namespace shmbs {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::missing_column: return "MissingColumn";
    case Errc::unparseable_date: return "UnparseableDate";
    case Errc::non_finite_value: return "NonFiniteValue";
    case Errc::coverage_gap: return "CoverageGap";
    case Errc::zero_variance: return "ZeroVariance";
    case Errc::dimension_mismatch: return "DimensionMismatch";
    case Errc::singular_innovation_covariance: return "SingularInnovationCovariance";
    case Errc::non_convergence: return "NonConvergence";
    case Errc::degenerate_series: return "DegenerateSeries";
    case Errc::misaligned_index: return "MisalignedIndex";
    case Errc::singular_sigma_eps: return "SingularSigmaEps";
    case Errc::rank_deficient_design: return "RankDeficientDesign";
    case Errc::flat_spectrum: return "FlatSpectrum";
    case Errc::insufficient_history: return "InsufficientHistory";
    case Errc::length_mismatch: return "LengthMismatch";
    case Errc::non_stationary_config: return "NonStationaryConfig";
    case Errc::config_error: return "ConfigError";
    case Errc::io_error: return "IoError";
  }
  return "UnknownError";
}

double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) raise(Errc::length_mismatch, "quantile of empty sample");
  if (q <= 0.0) return sorted.front();
  if (q >= 1.0) return sorted.back();
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const double frac = pos - static_cast<double>(lo);
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac;
}

double quantile(std::vector<double> values, double q) {
  std::sort(values.begin(), values.end());
  return quantile_sorted(values, q);
}

VectorXd sorted_column(const MatrixXd& x, int col) {
  VectorXd v = x.col(col);
  std::sort(v.data(), v.data() + v.size());
  return v;
}

double mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double sample_variance(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

double sample_sd(std::span<const double> v) { return std::sqrt(sample_variance(v)); }

void require_all_finite(const MatrixXd& x, const std::string& what) {
  if (!x.allFinite()) raise(Errc::non_finite_value, what + " contains a non-finite entry");
}

MatrixXd psd_sqrt(const MatrixXd& a) {
  Eigen::LLT<MatrixXd> llt(a);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(a);
  VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.asDiagonal();
}

}  // namespace shmbs

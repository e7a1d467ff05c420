#pragma once

#include <Eigen/Dense>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace shmbs {

using Eigen::ArrayXi;
using Eigen::ArrayXXi;
using Eigen::MatrixXd;
using Eigen::VectorXd;

enum class Errc {
  missing_column,
  unparseable_date,
  non_finite_value,
  coverage_gap,
  zero_variance,
  dimension_mismatch,
  singular_innovation_covariance,
  non_convergence,
  degenerate_series,
  misaligned_index,
  singular_sigma_eps,
  rank_deficient_design,
  flat_spectrum,
  insufficient_history,
  length_mismatch,
  non_stationary_config,
  config_error,
  io_error,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& msg)
      : std::runtime_error(std::string(errc_name(code)) + ": " + msg), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& msg) { throw Error(code, msg); }

// Empirical quantile with linear interpolation of order statistics
// (continuous in q, which the threshold sampler relies on).
double quantile_sorted(std::span<const double> sorted, double q);
double quantile(std::vector<double> values, double q);
VectorXd sorted_column(const MatrixXd& x, int col);

double mean(std::span<const double> v);
double sample_variance(std::span<const double> v);  // n-1 divisor
double sample_sd(std::span<const double> v);
inline double mean(const VectorXd& v) { return mean(std::span<const double>(v.data(), v.size())); }
inline double sample_variance(const VectorXd& v) {
  return sample_variance(std::span<const double>(v.data(), v.size()));
}
inline double sample_sd(const VectorXd& v) {
  return sample_sd(std::span<const double>(v.data(), v.size()));
}

void require_all_finite(const MatrixXd& x, const std::string& what);

// Symmetric PSD square root: Cholesky when possible, eigenvalue
// factorization with clamped spectrum as the pivot fallback.
MatrixXd psd_sqrt(const MatrixXd& a);

inline void symmetrize(MatrixXd& a) { a = 0.5 * (a + a.transpose()).eval(); }

}  // namespace shmbs

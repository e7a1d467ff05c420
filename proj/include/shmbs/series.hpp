#pragma once

#include <string>
#include <vector>

#include "shmbs/common.hpp"
#include "shmbs/dates.hpp"

namespace shmbs {

// Aligned m-variate observation panel on a trading-day index.
// Immutable after construction; safe to share across readers.
struct MultiSeries {
  std::vector<Date> index;
  MatrixXd values;  // one row per date, m columns
  std::vector<std::string> names;

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }

  // strictly increasing index, finite values, consistent shapes
  void validate() const;

  MultiSeries slice(Eigen::Index begin, Eigen::Index end) const;  // rows [begin, end)
};

// Daily soft-information scores: macro component d1, per-asset news
// component d2, and their combined per-asset score dt.
struct SoftScoreSeries {
  std::vector<Date> index;
  VectorXd d1;   // one per date
  MatrixXd d2;   // n x m
  MatrixXd dt;   // n x m, filled by normalize_and_combine

  Eigen::Index rows() const { return d1.size(); }
  Eigen::Index assets() const { return d2.cols(); }

  SoftScoreSeries slice(Eigen::Index begin, Eigen::Index end) const;
};

// Standardization constants estimated on a training span; persisted so
// the same map applies out of sample.
struct SoftNormalizer {
  double d1_mean = 0.0, d1_sd = 1.0;
  VectorXd d2_mean, d2_sd;
};

enum class AlignPolicy { mean_into_next_trading_day };

// Scores on non-trading days are folded into the next trading day.
SoftScoreSeries align_soft_scores(const SoftScoreSeries& scores,
                                  const std::vector<Date>& trading_index,
                                  AlignPolicy policy = AlignPolicy::mean_into_next_trading_day);

SoftNormalizer fit_soft_normalizer(const SoftScoreSeries& scores,
                                   Eigen::Index train_begin, Eigen::Index train_end);

// Standardize each component by the training constants and sum them
// into the combined per-asset score dt.
SoftScoreSeries normalize_and_combine(const SoftScoreSeries& scores, const SoftNormalizer& nz);

// Convenience: fit on [train_begin, train_end) and apply to the whole span.
SoftScoreSeries normalize_and_combine(const SoftScoreSeries& scores,
                                      Eigen::Index train_begin, Eigen::Index train_end,
                                      SoftNormalizer* out_normalizer = nullptr);

}  // namespace shmbs

#include "shmbs/series.hpp"

#include <algorithm>

namespace shmbs {

void MultiSeries::validate() const {
  if (static_cast<Eigen::Index>(index.size()) != values.rows())
    raise(Errc::dimension_mismatch, "index length does not match row count");
  if (static_cast<Eigen::Index>(names.size()) != values.cols())
    raise(Errc::dimension_mismatch, "name count does not match column count");
  for (std::size_t i = 1; i < index.size(); ++i)
    if (!(index[i - 1] < index[i]))
      raise(Errc::unparseable_date, "index not strictly increasing at row " + std::to_string(i));
  require_all_finite(values, "series panel");
}

MultiSeries MultiSeries::slice(Eigen::Index begin, Eigen::Index end) const {
  if (begin < 0 || end > rows() || begin > end)
    raise(Errc::length_mismatch, "slice out of range");
  MultiSeries out;
  out.index.assign(index.begin() + begin, index.begin() + end);
  out.values = values.middleRows(begin, end - begin);
  out.names = names;
  return out;
}

SoftScoreSeries SoftScoreSeries::slice(Eigen::Index begin, Eigen::Index end) const {
  if (begin < 0 || end > rows() || begin > end)
    raise(Errc::length_mismatch, "slice out of range");
  SoftScoreSeries out;
  out.index.assign(index.begin() + begin, index.begin() + end);
  out.d1 = d1.segment(begin, end - begin);
  out.d2 = d2.middleRows(begin, end - begin);
  if (dt.rows() == d1.size()) out.dt = dt.middleRows(begin, end - begin);
  return out;
}

SoftScoreSeries align_soft_scores(const SoftScoreSeries& scores,
                                  const std::vector<Date>& trading_index, AlignPolicy) {
  const Eigen::Index m = scores.assets();
  SoftScoreSeries out;
  out.index = trading_index;
  out.d1.resize(static_cast<Eigen::Index>(trading_index.size()));
  out.d2.resize(static_cast<Eigen::Index>(trading_index.size()), m);

  std::size_t pos = 0;  // cursor into scores.index (assumed sorted)
  Date prev_trading{INT32_MIN};
  for (std::size_t t = 0; t < trading_index.size(); ++t) {
    const Date day = trading_index[t];
    double sum1 = 0.0;
    VectorXd sum2 = VectorXd::Zero(m);
    int count = 0;
    while (pos < scores.index.size() && scores.index[pos] <= day) {
      if (scores.index[pos] > prev_trading) {
        sum1 += scores.d1[static_cast<Eigen::Index>(pos)];
        sum2 += scores.d2.row(static_cast<Eigen::Index>(pos)).transpose();
        ++count;
      }
      ++pos;
    }
    if (count == 0)
      raise(Errc::coverage_gap, "no score available for trading day " + format_date(day));
    out.d1[static_cast<Eigen::Index>(t)] = sum1 / count;
    out.d2.row(static_cast<Eigen::Index>(t)) = (sum2 / count).transpose();
    prev_trading = day;
  }
  return out;
}

SoftNormalizer fit_soft_normalizer(const SoftScoreSeries& scores,
                                   Eigen::Index train_begin, Eigen::Index train_end) {
  if (train_begin < 0 || train_end > scores.rows() || train_begin >= train_end)
    raise(Errc::length_mismatch, "empty or invalid training span");
  const Eigen::Index n = train_end - train_begin;
  const Eigen::Index m = scores.assets();

  SoftNormalizer nz;
  VectorXd d1 = scores.d1.segment(train_begin, n);
  nz.d1_mean = mean(d1);
  nz.d1_sd = sample_sd(d1);
  if (nz.d1_sd <= 0.0) raise(Errc::zero_variance, "d1 constant over training span");

  nz.d2_mean.resize(m);
  nz.d2_sd.resize(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    VectorXd col = scores.d2.col(j).segment(train_begin, n);
    nz.d2_mean[j] = mean(col);
    nz.d2_sd[j] = sample_sd(col);
    if (nz.d2_sd[j] <= 0.0)
      raise(Errc::zero_variance, "d2 constant over training span for asset " + std::to_string(j));
  }
  return nz;
}

SoftScoreSeries normalize_and_combine(const SoftScoreSeries& scores, const SoftNormalizer& nz) {
  SoftScoreSeries out = scores;
  const Eigen::Index n = scores.rows();
  const Eigen::Index m = scores.assets();
  out.dt.resize(n, m);
  for (Eigen::Index t = 0; t < n; ++t) {
    const double z1 = (scores.d1[t] - nz.d1_mean) / nz.d1_sd;
    for (Eigen::Index j = 0; j < m; ++j)
      out.dt(t, j) = z1 + (scores.d2(t, j) - nz.d2_mean[j]) / nz.d2_sd[j];
  }
  return out;
}

SoftScoreSeries normalize_and_combine(const SoftScoreSeries& scores,
                                      Eigen::Index train_begin, Eigen::Index train_end,
                                      SoftNormalizer* out_normalizer) {
  const SoftNormalizer nz = fit_soft_normalizer(scores, train_begin, train_end);
  if (out_normalizer) *out_normalizer = nz;
  return normalize_and_combine(scores, nz);
}

}  // namespace shmbs

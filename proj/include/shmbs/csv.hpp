#pragma once

#include <optional>
#include <string>
#include <vector>

#include "shmbs/series.hpp"

namespace shmbs {

struct LoadOptions {
  // subset / reorder by header name; empty keeps all non-date columns
  std::vector<std::string> columns;
  // fill an empty cell with the previous row's value instead of erroring
  bool forward_fill = false;
};

// CSV with a header row, first column an ISO-8601 date, remaining
// columns numeric. Rows are sorted by date; duplicate dates are an error.
MultiSeries load_series(const std::string& path, const LoadOptions& opts = {});
void write_series(const std::string& path, const MultiSeries& s);

// Soft-score CSV: date, d1, then one d2 column per asset.
SoftScoreSeries load_soft_scores(const std::string& path);
void write_soft_scores(const std::string& path, const SoftScoreSeries& s,
                       const std::vector<std::string>& asset_names);

// internal CSV helpers shared with the corpus reader
std::vector<std::string> split_csv_line(const std::string& line);
std::string format_g17(double v);

}  // namespace shmbs

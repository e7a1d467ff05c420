#include "shmbs/csv.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

namespace shmbs {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t");
  auto e = s.find_last_not_of(" \t");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(Errc::io_error, "cannot open '" + path + "'");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

double parse_cell(const std::string& cell, const std::string& where) {
  const std::string t = trim(cell);
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size() || t.empty() || !std::isfinite(v))
    raise(Errc::non_finite_value, "non-finite or non-numeric value at " + where);
  return v;
}

}  // namespace

MultiSeries load_series(const std::string& path, const LoadOptions& opts) {
  const auto lines = read_lines(path);
  if (lines.empty()) raise(Errc::io_error, "empty file '" + path + "'");
  const auto header = split_csv_line(lines[0]);
  if (header.size() < 2) raise(Errc::missing_column, "need a date column and at least one series");

  std::vector<std::string> names(header.begin() + 1, header.end());
  std::vector<int> take;  // source column index per kept series
  if (opts.columns.empty()) {
    take.resize(names.size());
    std::iota(take.begin(), take.end(), 1);
  } else {
    for (const auto& want : opts.columns) {
      auto it = std::find(names.begin(), names.end(), want);
      if (it == names.end())
        raise(Errc::missing_column, "column '" + want + "' not found in '" + path + "'");
      take.push_back(static_cast<int>(it - names.begin()) + 1);
    }
    names = opts.columns;
  }

  struct Row {
    Date date;
    std::vector<std::optional<double>> cells;
  };
  std::vector<Row> rows;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    if (trim(lines[li]).empty()) continue;
    const auto cells = split_csv_line(lines[li]);
    if (cells.size() != header.size())
      raise(Errc::missing_column, "row " + std::to_string(li) + " has " +
                                      std::to_string(cells.size()) + " cells, expected " +
                                      std::to_string(header.size()));
    Row r;
    r.date = parse_date(trim(cells[0]));
    for (int src : take) {
      const std::string cell = trim(cells[static_cast<std::size_t>(src)]);
      if (cell.empty())
        r.cells.push_back(std::nullopt);
      else
        r.cells.push_back(parse_cell(cell, "row " + std::to_string(li)));
    }
    rows.push_back(std::move(r));
  }

  std::stable_sort(rows.begin(), rows.end(),
                   [](const Row& a, const Row& b) { return a.date < b.date; });
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (rows[i].date == rows[i - 1].date)
      raise(Errc::unparseable_date, "duplicated date " + format_date(rows[i].date));

  MultiSeries out;
  out.names = names;
  out.index.reserve(rows.size());
  out.values.resize(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(names.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.index.push_back(rows[i].date);
    for (std::size_t j = 0; j < names.size(); ++j) {
      if (rows[i].cells[j]) {
        out.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = *rows[i].cells[j];
      } else if (opts.forward_fill && i > 0) {
        out.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            out.values(static_cast<Eigen::Index>(i - 1), static_cast<Eigen::Index>(j));
      } else {
        raise(Errc::non_finite_value,
              "missing value for '" + names[j] + "' on " + format_date(rows[i].date));
      }
    }
  }
  out.validate();
  return out;
}

void write_series(const std::string& path, const MultiSeries& s) {
  std::ofstream out(path);
  if (!out) raise(Errc::io_error, "cannot write '" + path + "'");
  out << "date";
  for (const auto& n : s.names) out << ',' << n;
  out << '\n';
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    out << format_date(s.index[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < s.cols(); ++j) out << ',' << format_g17(s.values(i, j));
    out << '\n';
  }
}

SoftScoreSeries load_soft_scores(const std::string& path) {
  LoadOptions opts;
  const MultiSeries panel = load_series(path, opts);
  if (panel.cols() < 2)
    raise(Errc::missing_column, "soft-score file needs d1 plus at least one d2 column");
  SoftScoreSeries out;
  out.index = panel.index;
  out.d1 = panel.values.col(0);
  out.d2 = panel.values.rightCols(panel.cols() - 1);
  return out;
}

void write_soft_scores(const std::string& path, const SoftScoreSeries& s,
                       const std::vector<std::string>& asset_names) {
  MultiSeries panel;
  panel.index = s.index;
  panel.names.push_back("d1");
  for (Eigen::Index j = 0; j < s.assets(); ++j)
    panel.names.push_back("d2_" + (static_cast<std::size_t>(j) < asset_names.size()
                                       ? asset_names[static_cast<std::size_t>(j)]
                                       : std::to_string(j + 1)));
  panel.values.resize(s.rows(), 1 + s.assets());
  panel.values.col(0) = s.d1;
  panel.values.rightCols(s.assets()) = s.d2;
  write_series(path, panel);
}

}  // namespace shmbs

#include "shmbs/regime.hpp"

#include <cmath>
#include <fstream>

#include "shmbs/csv.hpp"

namespace shmbs {

void RegimeThresholds::validate() const {
  for (Eigen::Index i = 0; i < tau_h_L.size(); ++i)
    if (!(tau_h_L[i] <= tau_h_U[i]))
      raise(Errc::dimension_mismatch, "hard thresholds out of order");
  for (Eigen::Index i = 0; i < tau_s_L.size(); ++i)
    if (!(tau_s_L[i] <= tau_s_U[i]))
      raise(Errc::dimension_mismatch, "soft thresholds out of order");
}

Zone classify_zone(RegimeType type, double r, double d, double tau_h_L, double tau_h_U,
                   double tau_s_L, double tau_s_U) {
  switch (type) {
    case RegimeType::I:
      if (r < tau_h_L) return Zone::regime1;
      if (r > tau_h_U) return Zone::regime0;
      return Zone::hysteresis;
    case RegimeType::II:
      if (r < tau_h_L && d < tau_s_U) return Zone::regime1;
      if (r > tau_h_U && d > tau_s_L) return Zone::regime0;
      return Zone::hysteresis;
    case RegimeType::III:
      if ((r <= tau_h_L && d <= tau_s_U) || (r <= tau_h_U && d <= tau_s_L)) return Zone::regime1;
      if ((r > tau_h_U && d > tau_s_L) || (r > tau_h_L && d > tau_s_U)) return Zone::regime0;
      return Zone::hysteresis;
    case RegimeType::IV:
      if (d <= tau_s_L) return Zone::regime1;
      if (d > tau_s_U) return Zone::regime0;
      return Zone::hysteresis;
  }
  return Zone::hysteresis;
}

ArrayXXi indicator_path(RegimeType type, const MatrixXd& r_tilde, const MatrixXd& soft,
                        const RegimeThresholds& thr, int init) {
  const Eigen::Index n = r_tilde.rows();
  const Eigen::Index m = r_tilde.cols();
  const bool needs_soft = type != RegimeType::I;
  const bool needs_hard = type != RegimeType::IV;
  if (needs_soft && (soft.rows() != n || soft.cols() != m))
    raise(Errc::misaligned_index, "soft scores not aligned with the driver panel");
  if (needs_hard && (thr.tau_h_L.size() != m || thr.tau_h_U.size() != m))
    raise(Errc::misaligned_index, "hard threshold count does not match asset count");
  if (needs_soft && (thr.tau_s_L.size() != m || thr.tau_s_U.size() != m))
    raise(Errc::misaligned_index, "soft threshold count does not match asset count");
  thr.validate();

  ArrayXXi path(n, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    int state = init;
    path(0, i) = state;
    for (Eigen::Index t = 1; t < n; ++t) {
      const double r = r_tilde(t - 1, i);
      const double d = needs_soft ? soft(t - 1, i) : 0.0;
      const double thL = needs_hard ? thr.tau_h_L[i] : 0.0;
      const double thU = needs_hard ? thr.tau_h_U[i] : 0.0;
      const double tsL = needs_soft ? thr.tau_s_L[i] : 0.0;
      const double tsU = needs_soft ? thr.tau_s_U[i] : 0.0;
      switch (classify_zone(type, r, d, thL, thU, tsL, tsU)) {
        case Zone::regime1: state = 1; break;
        case Zone::regime0: state = 0; break;
        case Zone::hysteresis: break;
      }
      path(t, i) = state;
    }
  }
  return path;
}

ArrayXi har_indicator(const VectorXd& x, double tau_L, double tau_U, int init) {
  if (!(tau_L <= tau_U)) raise(Errc::dimension_mismatch, "thresholds out of order");
  const Eigen::Index n = x.size();
  ArrayXi path(n);
  int state = init;
  path[0] = state;
  for (Eigen::Index t = 1; t < n; ++t) {
    if (x[t - 1] <= tau_L)
      state = 1;
    else if (x[t - 1] > tau_U)
      state = 0;
    path[t] = state;
  }
  return path;
}

ArrayXi aggregate(const ArrayXXi& per_asset, double k_star, int init) {
  if (!(k_star >= 0.5 && k_star <= 1.0))
    raise(Errc::dimension_mismatch, "k_star must lie in [0.5, 1]");
  const Eigen::Index n = per_asset.rows();
  const Eigen::Index m = per_asset.cols();
  const double need = k_star * static_cast<double>(m);
  ArrayXi global(n);
  int prev = init;
  for (Eigen::Index t = 0; t < n; ++t) {
    const int ones = per_asset.row(t).sum();
    const int zeros = static_cast<int>(m) - ones;
    if (static_cast<double>(ones) >= need)
      prev = 1;  // regime-1 branch takes precedence on ties
    else if (static_cast<double>(zeros) >= need)
      prev = 0;
    global[t] = prev;
  }
  return global;
}

void write_zone_grid(const std::string& path, const RegimeThresholds& thr, double lo, double hi,
                     int grid_n) {
  std::ofstream out(path);
  if (!out) raise(Errc::io_error, "cannot write '" + path + "'");
  out << "type,r,d,zone\n";
  const double step = (hi - lo) / (grid_n - 1);
  for (RegimeType type : {RegimeType::I, RegimeType::II, RegimeType::III, RegimeType::IV}) {
    for (int a = 0; a < grid_n; ++a) {
      for (int b = 0; b < grid_n; ++b) {
        const double r = lo + step * a;
        const double d = lo + step * b;
        const Zone z = classify_zone(type, r, d, thr.tau_h_L[0], thr.tau_h_U[0], thr.tau_s_L[0],
                                     thr.tau_s_U[0]);
        out << regime_type_name(type) << ',' << format_g17(r) << ',' << format_g17(d) << ','
            << zone_name(z) << '\n';
      }
    }
  }
}

const char* zone_name(Zone z) {
  switch (z) {
    case Zone::regime1: return "regime1";
    case Zone::regime0: return "regime0";
    case Zone::hysteresis: return "hysteresis";
  }
  return "?";
}

}  // namespace shmbs

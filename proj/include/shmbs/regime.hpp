#pragma once

#include <string>

#include "shmbs/common.hpp"
#include "shmbs/config.hpp"

namespace shmbs {

// Per-asset hysteresis thresholds and the quantile levels that induced
// them. Hard thresholds act on the de-volatilized driver, soft
// thresholds on the combined soft-information score.
struct RegimeThresholds {
  VectorXd tau_h_L, tau_h_U;  // per asset
  VectorXd tau_s_L, tau_s_U;
  double q_h_L = 0.0, q_h_U = 0.0, q_s_L = 0.0, q_s_U = 0.0;

  void validate() const;
};

enum class Zone { regime1, regime0, hysteresis };

// Pure zone classification of one (hard, soft) point under the chosen
// regime definition. Boundary conventions follow each definition as
// printed: type I/II strict on both sides, type III non-strict in the
// regime-1 region and strict in the regime-0 region, type IV non-strict
// for regime 1.
Zone classify_zone(RegimeType type, double r, double d, double tau_h_L, double tau_h_U,
                   double tau_s_L, double tau_s_U);

// Per-asset indicator paths. R_{i,1} = init; for t >= 2 the zone of
// (r_{i,t-1}, D_{i,t-1}) decides, with carry-over inside the hysteresis
// zone. `soft` may be empty for type I.
ArrayXXi indicator_path(RegimeType type, const MatrixXd& r_tilde, const MatrixXd& soft,
                        const RegimeThresholds& thr, int init);

// Classic single-threshold hard indicator with delay 1 and a non-strict
// lower boundary; the synthetic-data generator uses this form.
ArrayXi har_indicator(const VectorXd& x, double tau_L, double tau_U, int init);

// Aggregate per-asset indicators: R_t = 1 when at least k* m assets sit
// in regime 1, 0 when at least k* m sit in regime 0, previous value
// otherwise. Ties resolve to regime 1.
ArrayXi aggregate(const ArrayXXi& per_asset, double k_star, int init);

// Grid classification export for zone diagrams: one CSV row per
// (type, r, d) cell.
void write_zone_grid(const std::string& path, const RegimeThresholds& thr, double lo, double hi,
                     int grid_n);

const char* zone_name(Zone z);

}  // namespace shmbs

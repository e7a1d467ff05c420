#include "shmbs/garch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "shmbs/optim.hpp"

namespace shmbs {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;
constexpr double kShareCap = 1.0 - 1e-6;  // alpha + beta <= 1 - 1e-6

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
double logit(double p) { return std::log(p / (1.0 - p)); }

struct Params {
  double omega, alpha, beta;
};

// unconstrained coordinates: (log omega, logit of (alpha+beta)/cap, logit of alpha share)
Params decode(const VectorXd& th) {
  const double total = kShareCap * sigmoid(th[1]);
  const double share = sigmoid(th[2]);
  return {std::exp(th[0]), total * share, total * (1.0 - share)};
}

VectorXd encode(double omega, double alpha, double beta) {
  VectorXd th(3);
  th[0] = std::log(omega);
  th[1] = logit(std::min((alpha + beta) / kShareCap, 1.0 - 1e-9));
  th[2] = logit(std::max(alpha / std::max(alpha + beta, 1e-12), 1e-9));
  return th;
}

VectorXd recursion(const Params& p, const VectorXd& a, double h1) {
  const Eigen::Index n = a.size();
  VectorXd h(n);
  h[0] = h1;
  for (Eigen::Index t = 1; t < n; ++t)
    h[t] = p.omega + p.alpha * a[t - 1] * a[t - 1] + p.beta * h[t - 1];
  return h;
}

double neg_loglik(const Params& p, const VectorXd& a, double h1) {
  if (!(p.omega > 0.0)) return std::numeric_limits<double>::infinity();
  const VectorXd h = recursion(p, a, h1);
  double nll = 0.0;
  for (Eigen::Index t = 0; t < a.size(); ++t) {
    if (!(h[t] > 0.0)) return std::numeric_limits<double>::infinity();
    nll += 0.5 * (kLog2Pi + std::log(h[t]) + a[t] * a[t] / h[t]);
  }
  return nll;
}

}  // namespace

GarchFit fit_garch11(const VectorXd& returns) {
  const Eigen::Index n = returns.size();
  if (n < 50) raise(Errc::degenerate_series, "need at least 50 observations");
  const double rbar = mean(returns);
  const VectorXd a = returns.array() - rbar;
  const double var = sample_variance(a);
  if (!(var > 0.0)) raise(Errc::degenerate_series, "series has zero variance");

  const auto objective = [&](const VectorXd& th) {
    for (Eigen::Index i = 0; i < th.size(); ++i)
      if (!std::isfinite(th[i])) return std::numeric_limits<double>::infinity();
    return neg_loglik(decode(th), a, var);
  };

  // fixed multi-start grid
  const Params starts[3] = {
      {var * 0.05, 0.05, 0.90},
      {var * 0.10, 0.10, 0.80},
      {var * 0.48, 0.02, 0.50},
  };

  VectorXd best_x;
  double best_f = std::numeric_limits<double>::infinity();
  for (const Params& s : starts) {
    const VectorXd x0 = encode(s.omega, s.alpha, s.beta);
    const VectorXd steps = VectorXd::Constant(3, 0.25);
    auto res = nelder_mead(objective, x0, steps, 3000, 1e-12);
    // polish from the incumbent with a smaller simplex
    res = nelder_mead(objective, res.x, VectorXd::Constant(3, 0.02), 1500, 1e-13);
    if (res.fmin < best_f) {
      best_f = res.fmin;
      best_x = res.x;
    }
  }
  if (!std::isfinite(best_f)) raise(Errc::non_convergence, "GARCH likelihood never finite");

  const Params p = decode(best_x);
  GarchFit fit;
  fit.omega = p.omega;
  fit.alpha = p.alpha;
  fit.beta = p.beta;
  fit.mean = rbar;
  fit.h = recursion(p, a, var);
  fit.loglik = -best_f;
  return fit;
}

VectorXd degarch(const GarchFit& fit, const VectorXd& returns) {
  if (returns.size() != fit.h.size())
    raise(Errc::length_mismatch, "fit was produced from a series of different length");
  return (returns.array() - fit.mean) / fit.h.array().sqrt();
}

VectorXd degarch_extend(const GarchFit& fit, const VectorXd& fitted_returns,
                        const VectorXd& new_returns) {
  const Eigen::Index n0 = fitted_returns.size();
  if (n0 != fit.h.size()) raise(Errc::length_mismatch, "fit/sample length mismatch");
  VectorXd out(new_returns.size());
  double h_prev = fit.h[n0 - 1];
  double a_prev = fitted_returns[n0 - 1] - fit.mean;
  for (Eigen::Index t = 0; t < new_returns.size(); ++t) {
    const double h = fit.omega + fit.alpha * a_prev * a_prev + fit.beta * h_prev;
    out[t] = (new_returns[t] - fit.mean) / std::sqrt(h);
    h_prev = h;
    a_prev = new_returns[t] - fit.mean;
  }
  return out;
}

DeGarchSeries degarch_panel(const MatrixXd& returns, std::vector<GarchFit>* fits) {
  DeGarchSeries out;
  out.values.resize(returns.rows(), returns.cols());
  if (fits) fits->clear();
  for (Eigen::Index j = 0; j < returns.cols(); ++j) {
    GarchFit fit = fit_garch11(returns.col(j));
    out.values.col(j) = degarch(fit, returns.col(j));
    if (fits) fits->push_back(std::move(fit));
  }
  return out;
}

std::pair<double, double> hard_thresholds(const VectorXd& degarch_values, double q_lower,
                                          double q_upper) {
  if (!(q_lower > 0.0 && q_lower < q_upper && q_upper < 1.0))
    raise(Errc::config_error, "quantile levels must satisfy 0 < qL < qU < 1");
  VectorXd sorted = degarch_values;
  std::sort(sorted.data(), sorted.data() + sorted.size());
  const std::span<const double> s(sorted.data(), static_cast<std::size_t>(sorted.size()));
  return {quantile_sorted(s, q_lower), quantile_sorted(s, q_upper)};
}

}  // namespace shmbs

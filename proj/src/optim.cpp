#include "shmbs/optim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace shmbs {

NelderMeadResult nelder_mead(const std::function<double(const VectorXd&)>& f,
                             const VectorXd& x0, const VectorXd& steps,
                             int max_iter, double ftol) {
  const int n = static_cast<int>(x0.size());
  const double alpha = 1.0, gamma = 2.0, rho = 0.5, sigma = 0.5;

  std::vector<VectorXd> pts(n + 1, x0);
  std::vector<double> fv(n + 1);
  NelderMeadResult res;
  for (int i = 1; i <= n; ++i) pts[i][i - 1] += steps[i - 1];
  for (int i = 0; i <= n; ++i) {
    fv[i] = f(pts[i]);
    ++res.evals;
  }

  std::vector<int> ord(n + 1);
  for (int it = 0; it < max_iter; ++it) {
    std::iota(ord.begin(), ord.end(), 0);
    std::stable_sort(ord.begin(), ord.end(), [&](int a, int b) { return fv[a] < fv[b]; });
    const int best = ord[0], worst = ord[n], second = ord[n - 1];

    if (std::abs(fv[worst] - fv[best]) <= ftol * (std::abs(fv[best]) + ftol)) {
      res.converged = true;
      break;
    }

    VectorXd centroid = VectorXd::Zero(n);
    for (int i = 0; i <= n; ++i)
      if (i != worst) centroid += pts[i];
    centroid /= n;

    VectorXd xr = centroid + alpha * (centroid - pts[worst]);
    double fr = f(xr);
    ++res.evals;
    if (fr < fv[ord[0]]) {
      VectorXd xe = centroid + gamma * (xr - centroid);
      double fe = f(xe);
      ++res.evals;
      if (fe < fr) {
        pts[worst] = xe;
        fv[worst] = fe;
      } else {
        pts[worst] = xr;
        fv[worst] = fr;
      }
    } else if (fr < fv[second]) {
      pts[worst] = xr;
      fv[worst] = fr;
    } else {
      VectorXd xc = centroid + rho * (pts[worst] - centroid);
      double fc = f(xc);
      ++res.evals;
      if (fc < fv[worst]) {
        pts[worst] = xc;
        fv[worst] = fc;
      } else {
        for (int i = 0; i <= n; ++i) {
          if (i == best) continue;
          pts[i] = pts[best] + sigma * (pts[i] - pts[best]);
          fv[i] = f(pts[i]);
          ++res.evals;
        }
      }
    }
  }

  int best = 0;
  for (int i = 1; i <= n; ++i)
    if (fv[i] < fv[best]) best = i;
  res.x = pts[best];
  res.fmin = fv[best];
  return res;
}

}  // namespace shmbs

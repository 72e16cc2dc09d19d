#ifndef TRELLIP_OPTIMIZE_HPP
#define TRELLIP_OPTIMIZE_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace trellip {

// Nelder-Mead minimization. Returns the best vertex found; terminates when
// the simplex function spread drops below tol or the evaluation cap is hit.
template <typename F>
Eigen::VectorXd nelder_mead(F&& f, const Eigen::VectorXd& start,
                            double step = 0.1, double tol = 1e-9,
                            int max_evals = 500) {
  const int n = static_cast<int>(start.size());
  std::vector<Eigen::VectorXd> x(n + 1, start);
  std::vector<double> fx(n + 1);
  for (int i = 0; i < n; ++i) x[i + 1][i] += step;
  int evals = 0;
  for (int i = 0; i <= n; ++i) fx[i] = (++evals, f(x[i]));

  std::vector<int> order(n + 1);
  while (evals < max_evals) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int i, int j) { return fx[i] < fx[j]; });
    const int best = order[0], worst = order[n], second = order[n - 1];
    if (std::fabs(fx[worst] - fx[best]) <=
        tol * (std::fabs(fx[best]) + std::fabs(fx[worst]) + 1e-30))
      break;

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (int i = 0; i <= n; ++i)
      if (i != worst) centroid += x[i];
    centroid /= n;

    const Eigen::VectorXd xr = centroid + (centroid - x[worst]);
    const double fr = (++evals, f(xr));
    if (fr < fx[best]) {
      const Eigen::VectorXd xe = centroid + 2.0 * (centroid - x[worst]);
      const double fe = (++evals, f(xe));
      if (fe < fr) {
        x[worst] = xe;
        fx[worst] = fe;
      } else {
        x[worst] = xr;
        fx[worst] = fr;
      }
    } else if (fr < fx[second]) {
      x[worst] = xr;
      fx[worst] = fr;
    } else {
      const Eigen::VectorXd xc =
          centroid + 0.5 * ((fr < fx[worst] ? xr : x[worst]) - centroid);
      const double fc = (++evals, f(xc));
      if (fc < std::min(fr, fx[worst])) {
        x[worst] = xc;
        fx[worst] = fc;
      } else {
        for (int i = 0; i <= n; ++i) {
          if (i == best) continue;
          x[i] = x[best] + 0.5 * (x[i] - x[best]);
          fx[i] = (++evals, f(x[i]));
        }
      }
    }
  }
  int best = 0;
  for (int i = 1; i <= n; ++i)
    if (fx[i] < fx[best]) best = i;
  return x[best];
}

}  // namespace trellip

#endif  // TRELLIP_OPTIMIZE_HPP

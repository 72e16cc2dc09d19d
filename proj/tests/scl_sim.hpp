#ifndef TRELLIP_TESTS_SCL_SIM_HPP
#define TRELLIP_TESTS_SCL_SIM_HPP

// Simulated censored spatial datasets for the SCL recovery studies.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "trellip/rng.hpp"
#include "trellip/scl.hpp"

namespace testutil {

struct SclTruth {
  double beta0 = 2.0;
  double sigma2 = 2.0;
  double phi = 4.0;
  double tau2 = 0.5;
};

// n sites uniform on [0, side]^2, intercept-only design, exponential
// correlation, left-censoring at the empirical `cens_frac` quantile.
inline trellip::SclDataset simulate_scl(int n, const SclTruth& truth,
                                        double cens_frac, std::uint64_t seed,
                                        double side = 20.0) {
  trellip::Philox rng(seed);
  trellip::SclDataset data;
  data.coords.resize(n, 2);
  for (int i = 0; i < n; ++i) {
    data.coords(i, 0) = rng.uniform() * side;
    data.coords(i, 1) = rng.uniform() * side;
  }
  data.design = Eigen::MatrixXd::Ones(n, 1);

  Eigen::MatrixXd cov =
      truth.sigma2 * trellip::exp_corr(data.coords, truth.phi);
  cov.diagonal().array() += truth.tau2;
  const Eigen::MatrixXd chol_l = Eigen::LLT<Eigen::MatrixXd>(cov).matrixL();
  Eigen::VectorXd u(n);
  for (int i = 0; i < n; i += 2) {
    const double r = std::sqrt(-2.0 * std::log(rng.uniform()));
    const double a = 2.0 * M_PI * rng.uniform();
    u[i] = r * std::cos(a);
    if (i + 1 < n) u[i + 1] = r * std::sin(a);
  }
  const Eigen::VectorXd z =
      Eigen::VectorXd::Constant(n, truth.beta0) + chol_l * u;

  std::vector<double> sorted(z.data(), z.data() + n);
  std::nth_element(sorted.begin(),
                   sorted.begin() + static_cast<long>(cens_frac * n),
                   sorted.end());
  const double detection_limit = sorted[static_cast<long>(cens_frac * n)];

  data.v_lower.resize(n);
  data.v_upper.resize(n);
  data.observed.resize(n);
  data.cens.resize(n);
  for (int i = 0; i < n; ++i) {
    if (z[i] < detection_limit) {
      data.cens[i] = true;
      data.v_lower[i] = -std::numeric_limits<double>::infinity();
      data.v_upper[i] = detection_limit;
      data.observed[i] = std::numeric_limits<double>::quiet_NaN();
    } else {
      data.cens[i] = false;
      data.observed[i] = z[i];
      data.v_lower[i] = data.v_upper[i] = z[i];
    }
  }
  return data;
}

}  // namespace testutil

#endif  // TRELLIP_TESTS_SCL_SIM_HPP

#ifndef TRELLIP_TESTS_TEST_UTIL_HPP
#define TRELLIP_TESTS_TEST_UTIL_HPP

// Shared independent oracles for the test suites: closed-form truncated
// normal moments, batch-means Monte Carlo standard errors, a KS statistic,
// and a plain Simpson rule. These deliberately do not reuse the library's
// numeric kernels.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

namespace testutil {

inline double phi(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
}

inline double Phi(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Mean and variance of a standard normal truncated to [a,b] (+-inf allowed).
struct TnMoments {
  double mean;
  double var;
};

inline TnMoments truncated_normal_moments(double a, double b) {
  const double pa = std::isfinite(a) ? phi(a) : 0.0;
  const double pb = std::isfinite(b) ? phi(b) : 0.0;
  const double apa = std::isfinite(a) ? a * phi(a) : 0.0;
  const double bpb = std::isfinite(b) ? b * phi(b) : 0.0;
  const double z = Phi(b) - Phi(a);
  const double mean = (pa - pb) / z;
  const double var = 1.0 + (apa - bpb) / z - mean * mean;
  return {mean, var};
}

// CDF of the standard normal truncated to [a,b].
inline double truncated_normal_cdf(double x, double a, double b) {
  if (x <= a) return 0.0;
  if (x >= b) return 1.0;
  return (Phi(x) - Phi(a)) / (Phi(b) - Phi(a));
}

// Kolmogorov-Smirnov statistic of samples against a CDF.
template <typename Cdf>
double ks_statistic(std::vector<double> xs, Cdf&& cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max(d, std::fabs(f - (i + 1) / n));
    d = std::max(d, std::fabs(f - i / n));
  }
  return d;
}

// Asymptotic KS critical value at alpha = 0.01.
inline double ks_critical_01(std::size_t n) {
  return 1.62762 / std::sqrt(static_cast<double>(n));
}

// Standard error of the mean of one coordinate by batch means (robust to
// chain autocorrelation).
inline double batch_se_mean(const Eigen::VectorXd& x, int batches = 50) {
  const long n = x.size();
  const long nb = n / batches;
  Eigen::VectorXd means(batches);
  for (int b = 0; b < batches; ++b) means[b] = x.segment(b * nb, nb).mean();
  const double m = means.mean();
  const double var = (means.array() - m).square().sum() / (batches - 1);
  return std::sqrt(var / batches);
}

// Standard error of the (i,j) covariance entry by batch means.
inline double batch_se_cov(const Eigen::MatrixXd& samples, int i, int j,
                           int batches = 50) {
  const long n = samples.rows();
  const long nb = n / batches;
  Eigen::VectorXd est(batches);
  for (int b = 0; b < batches; ++b) {
    const auto xi = samples.col(i).segment(b * nb, nb).array();
    const auto xj = samples.col(j).segment(b * nb, nb).array();
    est[b] = (xi * xj).mean() - xi.mean() * xj.mean();
  }
  const double m = est.mean();
  const double var = (est.array() - m).square().sum() / (batches - 1);
  return std::sqrt(var / batches);
}

template <typename F>
double simpson(F&& f, double a, double b, int n = 2000) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

}  // namespace testutil

#endif  // TRELLIP_TESTS_TEST_UTIL_HPP

#ifndef TRELLIP_SPECIAL_HPP
#define TRELLIP_SPECIAL_HPP

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "trellip/errors.hpp"

namespace trellip {

inline constexpr double kLogTwoPi = 1.8378770664093454836;

// Regularized lower incomplete gamma P(a,x), a > 0, x >= 0.
// Series for x < a+1, Lentz continued fraction for the complement otherwise.
double gamma_p(double a, double x);

// log P(a,x), stable when P underflows (small x, moderate a).
double log_gamma_p(double a, double x);

inline double norm_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
}

inline double norm_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

// Inverse standard normal CDF (Acklam's rational approximation polished by
// one Halley step; full double accuracy on (0,1)).
double norm_quantile(double p);

inline double log_sum_exp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

// Log-density of N(mu, Sigma) at x, via a precomputed Cholesky factor.
inline double mvn_logpdf(const Eigen::VectorXd& x, const Eigen::VectorXd& mu,
                         const Eigen::LLT<Eigen::MatrixXd>& llt) {
  const Eigen::VectorXd z = llt.matrixL().solve(x - mu);
  const double logdet_half =
      Eigen::MatrixXd(llt.matrixL()).diagonal().array().log().sum();
  return -0.5 * x.size() * kLogTwoPi - logdet_half - 0.5 * z.squaredNorm();
}

inline double mvn_logpdf(const Eigen::VectorXd& x, const Eigen::VectorXd& mu,
                         const Eigen::MatrixXd& sigma) {
  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success)
    throw InvalidParameterError("mvn_logpdf: covariance not positive-definite");
  return mvn_logpdf(x, mu, llt);
}

}  // namespace trellip

#endif  // TRELLIP_SPECIAL_HPP

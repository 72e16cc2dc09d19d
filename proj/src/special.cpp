#include "trellip/special.hpp"

#include <cmath>

namespace trellip {

namespace {

// Series part: P(a,x) = x^a e^{-x} / Gamma(a+1) * sum_{n>=0} x^n / ((a+1)...(a+n)).
// Returns log of the sum (sum >= 1).
double log_series_sum(double a, double x) {
  double term = 1.0, sum = 1.0;
  for (int n = 1; n < 500; ++n) {
    term *= x / (a + n);
    sum += term;
    if (term < sum * 1e-16) return std::log(sum);
  }
  throw ConvergenceError("gamma_p: series did not converge");
}

// Continued fraction for Q(a,x) = 1 - P(a,x), valid for x >= a+1 (Lentz).
double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16)
      return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
  }
  throw ConvergenceError("gamma_p: continued fraction did not converge");
}

}  // namespace

double gamma_p(double a, double x) {
  if (!(a > 0.0) || x < 0.0)
    throw InvalidParameterError("gamma_p: requires a > 0, x >= 0");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) {
    const double lp =
        a * std::log(x) - x - std::lgamma(a + 1.0) + log_series_sum(a, x);
    return std::exp(lp);
  }
  return 1.0 - gamma_q_cf(a, x);
}

double norm_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw InvalidParameterError("norm_quantile: requires p in (0,1)");
  static constexpr double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                  -2.759285104469687e+02, 1.383577518672690e+02,
                                  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                  -1.556989798598866e+02, 6.680131188771972e+01,
                                  -1.328068155288572e+01};
  static constexpr double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                  -2.400758277161838e+00, -2.549732539343734e+00,
                                  4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                  2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double x;
  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    const double q = p - 0.5, r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
        q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // one Halley step
  const double e = 0.5 * std::erfc(-x * M_SQRT1_2) - p;
  const double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

double log_gamma_p(double a, double x) {
  if (!(a > 0.0) || x < 0.0)
    throw InvalidParameterError("log_gamma_p: requires a > 0, x >= 0");
  if (x == 0.0) return -std::numeric_limits<double>::infinity();
  if (x < a + 1.0)
    return a * std::log(x) - x - std::lgamma(a + 1.0) + log_series_sum(a, x);
  return std::log1p(-gamma_q_cf(a, x));
}

}  // namespace trellip

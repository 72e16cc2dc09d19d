#include "trellip/sampler.hpp"

#include <cassert>
#include <cmath>
#include <limits>

#include "trellip/hash.hpp"
#include "trellip/rng.hpp"

namespace trellip {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Core of the step-2/3 algebra shared by the public bounds function and the
// incremental Gibbs loop. s_j = (R^{-1} x)_j and q = x' R^{-1} x refer to the
// current state.
std::pair<double, double> slice_interval(double xj, double sj, double q,
                                         double rjj, double kappa_y,
                                         double aj, double bj) {
  const double lambda_j = xj - sj / rjj;
  const double eta_j = q - 2.0 * xj * sj + xj * xj * rjj;
  double rad = lambda_j * lambda_j + (kappa_y - eta_j) / rjj;
  if (rad < 0.0) {
    if (rad < -1e-12 * std::max(1.0, std::fabs(kappa_y)))
      throw std::logic_error(
          "slice_interval: negative radicand (point left the slice)");
    rad = 0.0;
  }
  const double tau_j = std::sqrt(rad);
  double lo = std::max(aj, lambda_j - tau_j);
  double hi = std::min(bj, lambda_j + tau_j);
  if (!(lo <= hi)) {
    // interval collapsed by rounding; keep the current point
    lo = hi = xj;
  }
  return {lo, hi};
}

Eigen::VectorXd default_x0(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  Eigen::VectorXd x(a.size());
  for (int j = 0; j < a.size(); ++j) {
    const bool lo_fin = std::isfinite(a[j]), hi_fin = std::isfinite(b[j]);
    if (lo_fin && hi_fin)
      x[j] = 0.5 * (a[j] + b[j]);
    else if (lo_fin)
      x[j] = a[j] + 1.0;
    else if (hi_fin)
      x[j] = b[j] - 1.0;
    else
      x[j] = 0.0;
    if (!(a[j] < x[j] && x[j] < b[j]))
      throw InvalidParameterError("slice_gibbs_sample: start point outside box");
  }
  return x;
}

}  // namespace

void TruncEllipticalSpec::validate() const {
  const int p = dim();
  if (p < 1) throw InvalidParameterError("spec: dimension must be >= 1");
  if (sigma.rows() != p || sigma.cols() != p)
    throw InvalidParameterError("spec: sigma must be p x p");
  if (lower.size() != p || upper.size() != p)
    throw InvalidParameterError("spec: bounds must have length p");
  if (family.dim() != p)
    throw InvalidParameterError("spec: family dimension mismatch");
  for (int j = 0; j < p; ++j) {
    if (std::isnan(lower[j]) || std::isnan(upper[j]))
      throw InvalidParameterError("spec: NaN bound");
    if (!(lower[j] < upper[j]))
      throw InvalidParameterError("spec: requires lower < upper");
  }
  if (!sigma.isApprox(sigma.transpose(), 1e-12))
    throw InvalidParameterError("spec: sigma must be symmetric");
  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success)
    throw InvalidParameterError("spec: sigma not positive-definite");
}

std::uint64_t TruncEllipticalSpec::digest() const {
  std::uint64_t h = family.digest(14695981039346656037ull);
  auto fold = [&h](const Eigen::MatrixXd& m) {
    for (long i = 0; i < m.size(); ++i) h = fnv1a(m.data()[i], h);
  };
  fold(mu);
  fold(sigma);
  fold(lower);
  fold(upper);
  return h;
}

StandardizedSpec standardize(const TruncEllipticalSpec& spec) {
  spec.validate();
  const int p = spec.dim();
  StandardizedSpec out;
  out.lambda = spec.sigma.diagonal().cwiseSqrt();
  const Eigen::VectorXd inv_lambda = out.lambda.cwiseInverse();
  out.corr = inv_lambda.asDiagonal() * spec.sigma * inv_lambda.asDiagonal();
  out.corr.diagonal().setOnes();
  out.lower_std.resize(p);
  out.upper_std.resize(p);
  for (int j = 0; j < p; ++j) {
    // keeps infinite bounds infinite with the right sign
    out.lower_std[j] = std::isfinite(spec.lower[j])
                           ? (spec.lower[j] - spec.mu[j]) * inv_lambda[j]
                           : spec.lower[j];
    out.upper_std[j] = std::isfinite(spec.upper[j])
                           ? (spec.upper[j] - spec.mu[j]) * inv_lambda[j]
                           : spec.upper[j];
  }
  Eigen::LLT<Eigen::MatrixXd> llt(out.corr);
  if (llt.info() != Eigen::Success)
    throw InvalidParameterError("standardize: correlation not positive-definite");
  out.rinv = llt.solve(Eigen::MatrixXd::Identity(p, p));
  return out;
}

std::pair<double, double> coordinate_slice_bounds(
    const Eigen::VectorXd& x, int j, const Eigen::MatrixXd& rinv,
    double kappa_y, const Eigen::VectorXd& lower_std,
    const Eigen::VectorXd& upper_std) {
  const double sj = rinv.row(j).dot(x);
  const double q = x.dot(rinv * x);
  return slice_interval(x[j], sj, q, rinv(j, j), kappa_y, lower_std[j],
                        upper_std[j]);
}

Chain slice_gibbs_sample(const TruncEllipticalSpec& spec, long n, int burn_in,
                         int thinning, std::uint64_t seed,
                         const std::optional<Eigen::VectorXd>& x0) {
  spec.validate();
  if (n < 1) throw InvalidParameterError("slice_gibbs_sample: n must be >= 1");
  if (burn_in < 0)
    throw InvalidParameterError("slice_gibbs_sample: burn_in must be >= 0");
  if (thinning < 1)
    throw InvalidParameterError("slice_gibbs_sample: thinning must be >= 1");

  const int p = spec.dim();
  const StandardizedSpec std_spec = standardize(spec);
  const Eigen::VectorXd& a = std_spec.lower_std;
  const Eigen::VectorXd& b = std_spec.upper_std;
  const Eigen::MatrixXd& rinv = std_spec.rinv;

  Eigen::VectorXd x;
  if (x0) {
    if (x0->size() != p)
      throw InvalidParameterError("slice_gibbs_sample: x0 has wrong length");
    for (int j = 0; j < p; ++j)
      if (!(spec.lower[j] < (*x0)[j] && (*x0)[j] < spec.upper[j]))
        throw InvalidParameterError("slice_gibbs_sample: x0 outside box");
    x = (x0->array() - spec.mu.array()).matrix().cwiseQuotient(std_spec.lambda);
    if (!std::isfinite(dgf_eval(spec.family, x.dot(rinv * x))))
      throw InvalidParameterError(
          "slice_gibbs_sample: dgf is not finite at x0");
  } else {
    x = default_x0(a, b);
    if (!std::isfinite(dgf_eval(spec.family, x.dot(rinv * x)))) {
      // a dgf unbounded at 0 (Kotz with N < 1) rejects the all-zero default;
      // move one coordinate off the origin
      for (int j = 0; j < p; ++j) {
        if (x[j] != 0.0) continue;
        x[j] = std::isfinite(b[j]) ? 0.5 * b[j] : 1.0;
        break;
      }
      if (!std::isfinite(dgf_eval(spec.family, x.dot(rinv * x))))
        throw InvalidParameterError(
            "slice_gibbs_sample: could not find a valid start point");
    }
  }

  Philox rng(seed);
  Eigen::VectorXd s(p);  // s = R^{-1} x, updated incrementally within a sweep
  double q = 0.0;        // q = x' R^{-1} x

  Chain chain;
  chain.samples.resize(n, p);
  chain.seed = seed;
  chain.burn_in = burn_in;
  chain.thinning = thinning;
  chain.spec_digest = spec.digest();

  const long total = burn_in + n * static_cast<long>(thinning);
  long kept = 0;
  for (long iter = 1; iter <= total; ++iter) {
    s.noalias() = rinv * x;  // refresh per sweep so rounding cannot drift
    q = std::max(x.dot(s), 0.0);
    const double gq = dgf_eval(spec.family, q);
    if (!std::isfinite(gq) || !(gq > 0.0))
      throw std::logic_error("slice_gibbs_sample: dgf not finite-positive at "
                             "the current state");
    const double y = rng.uniform() * gq;
    // y < g(q) guarantees kappa_y >= q exactly; clamp away inverse roundoff
    const double kappa_y = std::max(dgf_inverse(spec.family, y), q);

    for (int j = 0; j < p; ++j) {
      auto [lo, hi] = slice_interval(x[j], s[j], q, rinv(j, j), kappa_y, a[j],
                                     b[j]);
      double xj = lo < hi ? rng.uniform(lo, hi) : lo;
      if (xj <= lo && lo < hi) xj = std::nextafter(lo, hi);
      if (xj >= hi && lo < hi) xj = std::nextafter(hi, lo);
      const double delta = xj - x[j];
      q += delta * (2.0 * s[j] + delta * rinv(j, j));
      s += delta * rinv.col(j);
      x[j] = xj;
    }
    assert(q <= kappa_y * (1.0 + 1e-9) + 1e-9);  // slice membership

    if (iter > burn_in && (iter - burn_in) % thinning == 0) {
      for (int j = 0; j < p; ++j) {
        double v = spec.mu[j] + std_spec.lambda[j] * x[j];
        // strict containment in the original box despite rounding
        if (v <= spec.lower[j]) v = std::nextafter(spec.lower[j], kInf);
        if (v >= spec.upper[j]) v = std::nextafter(spec.upper[j], -kInf);
        chain.samples(kept, j) = v;
      }
      ++kept;
    }
  }
  return chain;
}

Eigen::MatrixXd acf(const Eigen::MatrixXd& samples, int max_lag) {
  const long n = samples.rows();
  const int p = static_cast<int>(samples.cols());
  if (max_lag < 1) throw InvalidParameterError("acf: max_lag must be >= 1");
  if (n <= max_lag)
    throw InvalidParameterError("acf: chain shorter than max_lag");
  Eigen::MatrixXd out(max_lag, p);
  for (int j = 0; j < p; ++j) {
    const Eigen::ArrayXd c = samples.col(j).array() - samples.col(j).mean();
    const double denom = (c * c).sum();
    for (int k = 1; k <= max_lag; ++k) {
      const double num = (c.head(n - k) * c.tail(n - k)).sum();
      out(k - 1, j) = denom > 0.0
                          ? num / denom
                          : std::numeric_limits<double>::quiet_NaN();
    }
  }
  return out;
}

}  // namespace trellip

#ifndef TRELLIP_SAMPLER_HPP
#define TRELLIP_SAMPLER_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <utility>

#include "trellip/family.hpp"

namespace trellip {

// Sampling/moment target: a p-variate elliptical distribution truncated to
// the box {a < x < b}. Bounds may be +-inf componentwise.
struct TruncEllipticalSpec {
  Eigen::VectorXd mu;
  Eigen::MatrixXd sigma;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  Family family;

  int dim() const { return static_cast<int>(mu.size()); }
  // Throws InvalidParameterError on shape mismatch, non-SPD sigma,
  // lower >= upper, or family dimension mismatch.
  void validate() const;
  std::uint64_t digest() const;
};

// The zero-location, correlation-scale problem the Gibbs loop runs on,
// with Sigma = Lambda R Lambda and bounds mapped by a* = Lambda^{-1}(a-mu).
struct StandardizedSpec {
  Eigen::MatrixXd corr;       // R, unit diagonal
  Eigen::MatrixXd rinv;       // R^{-1}
  Eigen::VectorXd lower_std;  // a*
  Eigen::VectorXd upper_std;  // b*
  Eigen::VectorXd lambda;     // sqrt(diag(Sigma))
};

StandardizedSpec standardize(const TruncEllipticalSpec& spec);

// Seeded, thinned slice-sampling output. Immutable after construction; safe
// to share across threads.
struct Chain {
  Eigen::MatrixXd samples;  // n x p, rows strictly inside (lower, upper)
  std::uint64_t seed = 0;
  int burn_in = 0;
  int thinning = 1;
  std::uint64_t spec_digest = 0;

  long n() const { return samples.rows(); }
  int dim() const { return static_cast<int>(samples.cols()); }
};

// Interval for the Gibbs update of coordinate j on the slice
// {x : x' R^{-1} x < kappa_y} intersected with the box. Requires that the
// current x lies inside the slice; the result is nonempty and contains x[j].
std::pair<double, double> coordinate_slice_bounds(
    const Eigen::VectorXd& x, int j, const Eigen::MatrixXd& rinv,
    double kappa_y, const Eigen::VectorXd& lower_std,
    const Eigen::VectorXd& upper_std);

// Slice sampler with Gibbs coordinate steps on the standardized problem,
// mapped back through mu + Lambda x. Runs burn_in + n*thinning iterations
// and keeps every thinning-th state after burn-in. Deterministic per seed.
// x0 (original coordinates) must satisfy lower < x0 < upper; default is the
// box midpoint (finite bounds), one unit inside a single finite bound, or 0.
Chain slice_gibbs_sample(const TruncEllipticalSpec& spec, long n, int burn_in,
                         int thinning, std::uint64_t seed,
                         const std::optional<Eigen::VectorXd>& x0 = {});

// Sample autocorrelations at lags 1..max_lag, one column per coordinate.
// A degenerate (constant) coordinate yields NaN entries.
Eigen::MatrixXd acf(const Eigen::MatrixXd& samples, int max_lag);

inline Eigen::MatrixXd acf(const Chain& chain, int max_lag) {
  return acf(chain.samples, max_lag);
}

}  // namespace trellip

#endif  // TRELLIP_SAMPLER_HPP

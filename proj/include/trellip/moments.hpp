#ifndef TRELLIP_MOMENTS_HPP
#define TRELLIP_MOMENTS_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>

#include "trellip/partition.hpp"
#include "trellip/sampler.hpp"

namespace trellip {

struct ExistenceRecord {
  bool mean_exists = true;
  bool cov_exists = true;
  std::string reason;
};

// First two truncated moments. cov == second_moment - mean*mean' holds by
// construction on every route. omega21 is NaN when the partitioned scaling
// constant was not used (full route, or p2 == 0).
struct MomentEstimate {
  Eigen::VectorXd mean;
  Eigen::MatrixXd second_moment;
  Eigen::MatrixXd cov;
  double omega21 = std::numeric_limits<double>::quiet_NaN();
  long n_used = 0;
  ExistenceRecord existence;
  std::string warning;
};

struct MomentOptions {
  long n = 10000;
  int burn_in = 0;
  int thinning = 3;
  std::uint64_t seed = 0;
  // Compute even when the requested moments diverge; the estimate keeps the
  // failing existence record instead of this call throwing.
  bool allow_divergent = false;
};

// Moment-existence rules per family. d = number of doubly truncated
// coordinates, p2e = p - d. A fully bounded box (d == p) makes everything
// finite for any family. Otherwise:
//   Student-t:   mean iff nu + d > 1, cov iff nu + d > 2
//   Pearson VII: mean iff m > (p2e+1)/2, cov iff m > (p2e+2)/2
//   Slash:       mean always, cov iff nu > 1
//   normal / power exponential / contaminated normal / Kotz: always finite.
// The Student-t block rules are the Pearson VII ones under m = (nu+p)/2.
ExistenceRecord existence_check(const Family& family,
                                const PartitionedSpec& part);

// Plain Monte Carlo moments over n kept draws of the full vector.
MomentEstimate mc_moments_full(const TruncEllipticalSpec& spec,
                               const MomentOptions& opt);

// Algorithm route that samples only the truncated block from its marginal
// family and assembles the free block analytically. Falls back to the full
// route for families without closed marginals (power exponential, Kotz,
// custom) and when every coordinate is truncated.
MomentEstimate mc_moments_partitioned(const TruncEllipticalSpec& spec,
                                      const MomentOptions& opt);

struct OmegaDiagnostics {
  long dropped = 0;
  std::string warning;
};

// Conditional-dgf scaling constant omega_{2.1} entering the free-block
// covariance. chain1 holds draws of the truncated block from its marginal
// truncated family; xi1/omega11 are its estimated mean and covariance.
double omega21(const Family& family, const PartitionedSpec& part,
               const Eigen::MatrixXd& chain1, const Eigen::VectorXd& xi1,
               const Eigen::MatrixXd& omega11,
               OmegaDiagnostics* diag = nullptr);

}  // namespace trellip

#endif  // TRELLIP_MOMENTS_HPP

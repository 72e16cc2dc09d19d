#ifndef TRELLIP_PARTITION_HPP
#define TRELLIP_PARTITION_HPP

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "trellip/sampler.hpp"

namespace trellip {

// Block view of a truncated spec: block 1 holds every coordinate with at
// least one finite bound, block 2 the rest. idx_* record the original
// positions so results can be unpermuted.
struct PartitionedSpec {
  explicit PartitionedSpec(Family fam) : family(std::move(fam)) {}

  std::vector<int> idx_trunc;  // block 1, size p1
  std::vector<int> idx_free;   // block 2, size p2
  Eigen::VectorXd mu1, mu2;
  Eigen::MatrixXd s11, s22, s12, s21;
  Eigen::VectorXd a1, b1;
  Family family;  // family of the full p-vector

  int p1() const { return static_cast<int>(idx_trunc.size()); }
  int p2() const { return static_cast<int>(idx_free.size()); }
  int dim() const { return p1() + p2(); }
  // number of doubly truncated coordinates (both bounds finite)
  int doubly_truncated() const;
};

PartitionedSpec split(const TruncEllipticalSpec& spec);

// Squared Mahalanobis distance of x1 from mu1 under s11, via Cholesky.
double mahalanobis1(const Eigen::VectorXd& x1, const PartitionedSpec& part);

// Distribution of the free block given the truncated block at x1.
// scale_mult multiplies s21_base (Student-t lambda; 1 otherwise), so the
// conditional scale matrix is scale_mult * s21_base.
struct ConditionalParams {
  Eigen::VectorXd mu21;        // mu2 + s21 s11^{-1} (x1 - mu1)
  Eigen::MatrixXd s21_base;    // s22 - s21 s11^{-1} s12
  Eigen::MatrixXd regression;  // s21 s11^{-1}
  Family family_cond;
  double scale_mult = 1.0;
};

ConditionalParams conditional_params(const PartitionedSpec& part,
                                     const Eigen::VectorXd& x1);

// Marginal family of the truncated block; nullopt when the family is not
// closed under marginalization (power exponential, Kotz, custom), in which
// case moments take the full-vector Monte Carlo route.
std::optional<Family> marginal_family(const PartitionedSpec& part);

}  // namespace trellip

#endif  // TRELLIP_PARTITION_HPP

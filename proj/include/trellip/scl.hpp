#ifndef TRELLIP_SCL_HPP
#define TRELLIP_SCL_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "trellip/errors.hpp"

namespace trellip {

// Censored spatial dataset: response Z = X beta + xi observed exactly where
// cens[i] == false, and known only to lie in [v_lower[i], v_upper[i]] where
// cens[i] == true (v_lower may be -inf for left censoring).
struct SclDataset {
  Eigen::MatrixXd coords;   // n x 2 site locations
  Eigen::MatrixXd design;   // n x q
  Eigen::VectorXd v_lower;  // censoring interval, rows with cens == true
  Eigen::VectorXd v_upper;
  Eigen::VectorXd observed;  // observed value, rows with cens == false
  std::vector<bool> cens;

  int n() const { return static_cast<int>(coords.rows()); }
  int q() const { return static_cast<int>(design.cols()); }
  int n_censored() const;
  void validate() const;
};

// theta = (beta, sigma2, phi, tau2) with Sigma = sigma2 * (R(phi) + nu2 I),
// nu2 = tau2 / sigma2.
struct SclParams {
  Eigen::VectorXd beta;
  double sigma2 = 1.0;
  double phi = 1.0;
  double tau2 = 0.0;

  double nu2() const { return tau2 / sigma2; }
  void validate() const;
};

// Exponential correlation R_ij = exp(-d_ij / phi), Euclidean distances.
Eigen::MatrixXd exp_corr(const Eigen::MatrixXd& coords, double phi);

struct EStepResult {
  Eigen::VectorXd zhat;   // E(Z | V, C, theta)
  Eigen::MatrixXd zzhat;  // E(Z Z' | V, C, theta)
};

// Conditional moments of the response: censored coordinates follow the
// truncated conditional normal given the observed ones; moments come from
// the partitioned Monte Carlo estimator with n_mc kept draws.
EStepResult e_step(const SclDataset& data, const SclParams& params, long n_mc,
                   std::uint64_t seed);

// Closed-form beta and sigma2 updates; (phi, nu2) by Nelder-Mead on the
// profile objective in log coordinates, restarted from the previous iterate.
SclParams m_step(const SclDataset& data, const Eigen::VectorXd& zhat,
                 const Eigen::MatrixXd& zzhat, const SclParams& prev);

// Observed-data log-likelihood: exact Gaussian density of the uncensored
// block plus the log-probability of the censored box under the conditional
// normal, the latter by Monte Carlo with antithetic pairs (fixed seed).
double observed_loglik(const SclDataset& data, const SclParams& params,
                       long n_mc = 10000, std::uint64_t seed = 0);

struct SclFitOptions {
  int iters = 500;
  long n_mc_start = 5000;  // linear schedule from start to end across iters
  long n_mc_end = 5000;
  int burn_in = 250;  // trace burn-in for the final averaged estimate
  int thinning = 3;
  std::uint64_t seed = 0;
  long loglik_n_mc = 10000;
};

struct SclFit {
  SclParams params;       // mean of the post-burn-in, thinned trace
  Eigen::MatrixXd trace;  // iters x (q+3): beta..., sigma2, phi, tau2
  double loglik = 0.0;
  double aic = 0.0;
  double bic = 0.0;
  int n_params = 0;
};

SclFit fit_mcem(const SclDataset& data, const SclParams& init,
                const SclFitOptions& opt);

}  // namespace trellip

#endif  // TRELLIP_SCL_HPP

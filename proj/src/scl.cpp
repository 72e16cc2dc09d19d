#include "trellip/scl.hpp"

#include <cmath>

#include "trellip/moments.hpp"
#include "trellip/optimize.hpp"
#include "trellip/rng.hpp"
#include "trellip/special.hpp"

namespace trellip {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::MatrixXd psi_matrix(const SclDataset& data, double phi, double nu2) {
  Eigen::MatrixXd psi = exp_corr(data.coords, phi);
  psi.diagonal().array() += nu2;
  return psi;
}

// tr(ZZ' Psi^{-1}) - 2 z' Psi^{-1} X b + b' X' Psi^{-1} X b
double quad_term(const Eigen::MatrixXd& zzhat, const Eigen::VectorXd& zhat,
                 const Eigen::MatrixXd& x, const Eigen::VectorXd& beta,
                 const Eigen::LLT<Eigen::MatrixXd>& llt) {
  const Eigen::VectorXd xb = x * beta;
  const Eigen::MatrixXd psi_inv_zz = llt.solve(zzhat);
  return psi_inv_zz.trace() - 2.0 * zhat.dot(llt.solve(xb)) +
         xb.dot(llt.solve(xb));
}

struct ConditionalNormal {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

// Distribution of the censored block given the observed one under
// N(X beta, sigma2 * Psi).
ConditionalNormal censored_conditional(const SclDataset& data,
                                       const SclParams& params,
                                       const std::vector<int>& cens_idx,
                                       const std::vector<int>& obs_idx) {
  const Eigen::MatrixXd sigma =
      params.sigma2 * psi_matrix(data, params.phi, params.nu2());
  const Eigen::VectorXd mu = data.design * params.beta;
  const int nc = static_cast<int>(cens_idx.size());
  const int no = static_cast<int>(obs_idx.size());

  ConditionalNormal out;
  out.mean.resize(nc);
  out.cov.resize(nc, nc);
  for (int i = 0; i < nc; ++i) {
    out.mean[i] = mu[cens_idx[i]];
    for (int k = 0; k < nc; ++k)
      out.cov(i, k) = sigma(cens_idx[i], cens_idx[k]);
  }
  if (no == 0) return out;

  Eigen::MatrixXd s_oo(no, no), s_co(nc, no);
  Eigen::VectorXd resid(no);
  for (int i = 0; i < no; ++i) {
    resid[i] = data.observed[obs_idx[i]] - mu[obs_idx[i]];
    for (int k = 0; k < no; ++k) s_oo(i, k) = sigma(obs_idx[i], obs_idx[k]);
    for (int c = 0; c < nc; ++c) s_co(c, i) = sigma(cens_idx[c], obs_idx[i]);
  }
  Eigen::LLT<Eigen::MatrixXd> llt(s_oo);
  if (llt.info() != Eigen::Success)
    throw InvalidParameterError("e_step: observed covariance block not "
                                "positive-definite");
  out.mean += s_co * llt.solve(resid);
  out.cov -= s_co * llt.solve(s_co.transpose());
  out.cov = 0.5 * (out.cov + out.cov.transpose().eval());
  return out;
}

void split_indices(const SclDataset& data, std::vector<int>& cens_idx,
                   std::vector<int>& obs_idx) {
  for (int i = 0; i < data.n(); ++i)
    (data.cens[i] ? cens_idx : obs_idx).push_back(i);
}

}  // namespace

int SclDataset::n_censored() const {
  int c = 0;
  for (bool b : cens) c += b;
  return c;
}

void SclDataset::validate() const {
  const int m = n();
  if (m < 1) throw InvalidParameterError("scl: empty dataset");
  if (coords.cols() != 2)
    throw InvalidParameterError("scl: coords must be n x 2");
  if (design.rows() != m || design.cols() < 1)
    throw InvalidParameterError("scl: design must be n x q, q >= 1");
  if (static_cast<int>(cens.size()) != m || v_lower.size() != m ||
      v_upper.size() != m || observed.size() != m)
    throw InvalidParameterError("scl: column lengths disagree");
  for (int i = 0; i < m; ++i) {
    if (cens[i]) {
      if (!(v_lower[i] < v_upper[i]))
        throw InvalidParameterError("scl: censoring interval must satisfy "
                                    "lower < upper");
    } else if (!std::isfinite(observed[i])) {
      throw InvalidParameterError("scl: uncensored observation must be finite");
    }
    for (int k = i + 1; k < m; ++k)
      if ((coords.row(i) - coords.row(k)).norm() == 0.0)
        throw InvalidParameterError("scl: duplicated coordinates");
  }
}

void SclParams::validate() const {
  if (beta.size() < 1) throw InvalidParameterError("scl: beta empty");
  if (!(sigma2 > 0.0) || !(phi > 0.0) || !(tau2 >= 0.0))
    throw InvalidParameterError("scl: requires sigma2 > 0, phi > 0, tau2 >= 0");
}

Eigen::MatrixXd exp_corr(const Eigen::MatrixXd& coords, double phi) {
  if (!(phi > 0.0)) throw InvalidParameterError("exp_corr: phi must be > 0");
  const int m = static_cast<int>(coords.rows());
  Eigen::MatrixXd r(m, m);
  for (int i = 0; i < m; ++i) {
    r(i, i) = 1.0;
    for (int k = i + 1; k < m; ++k) {
      const double cor = std::exp(-(coords.row(i) - coords.row(k)).norm() / phi);
      r(i, k) = cor;
      r(k, i) = cor;
    }
  }
  return r;
}

EStepResult e_step(const SclDataset& data, const SclParams& params, long n_mc,
                   std::uint64_t seed) {
  data.validate();
  params.validate();
  std::vector<int> cens_idx, obs_idx;
  split_indices(data, cens_idx, obs_idx);

  EStepResult out;
  out.zhat.resize(data.n());
  for (int i : obs_idx) out.zhat[i] = data.observed[i];

  if (cens_idx.empty()) {
    out.zzhat = out.zhat * out.zhat.transpose();
    return out;
  }

  const ConditionalNormal cond =
      censored_conditional(data, params, cens_idx, obs_idx);
  const int nc = static_cast<int>(cens_idx.size());
  Eigen::VectorXd lo(nc), hi(nc);
  for (int i = 0; i < nc; ++i) {
    lo[i] = data.v_lower[cens_idx[i]];
    hi[i] = data.v_upper[cens_idx[i]];
  }
  TruncEllipticalSpec spec{cond.mean, cond.cov, lo, hi, Family::normal(nc)};
  MomentOptions opt;
  opt.n = n_mc;
  opt.seed = seed;
  const MomentEstimate est = mc_moments_partitioned(spec, opt);

  for (int i = 0; i < nc; ++i) out.zhat[cens_idx[i]] = est.mean[i];
  out.zzhat = out.zhat * out.zhat.transpose();
  for (int i = 0; i < nc; ++i)
    for (int k = 0; k < nc; ++k)
      out.zzhat(cens_idx[i], cens_idx[k]) += est.cov(i, k);
  return out;
}

SclParams m_step(const SclDataset& data, const Eigen::VectorXd& zhat,
                 const Eigen::MatrixXd& zzhat, const SclParams& prev) {
  data.validate();
  prev.validate();
  const Eigen::MatrixXd& x = data.design;
  const int m = data.n();

  const Eigen::MatrixXd psi_prev =
      psi_matrix(data, prev.phi, std::max(prev.nu2(), 1e-10));
  Eigen::LLT<Eigen::MatrixXd> llt(psi_prev);
  if (llt.info() != Eigen::Success)
    throw InvalidParameterError("m_step: Psi not positive-definite");

  const Eigen::MatrixXd xtpx = x.transpose() * llt.solve(x);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(xtpx);
  if (!lu.isInvertible())
    throw InvalidParameterError("m_step: singular design (X' Psi^{-1} X)");
  const Eigen::VectorXd beta = lu.solve(x.transpose() * llt.solve(zhat));

  const double sigma2 = quad_term(zzhat, zhat, x, beta, llt) / m;
  if (!(sigma2 > 0.0))
    throw ConvergenceError("m_step: nonpositive sigma2 update");

  // alpha = (phi, nu2), maximized in log coordinates for positivity
  auto neg_profile = [&](const Eigen::VectorXd& w) {
    const double phi = std::exp(w[0]), nu2 = std::exp(w[1]);
    if (!std::isfinite(phi) || !std::isfinite(nu2)) return 1e100;
    Eigen::LLT<Eigen::MatrixXd> l(psi_matrix(data, phi, nu2));
    if (l.info() != Eigen::Success) return 1e100;
    const double logdet =
        2.0 * Eigen::MatrixXd(l.matrixL()).diagonal().array().log().sum();
    return 0.5 * logdet + quad_term(zzhat, zhat, x, beta, l) / (2.0 * sigma2);
  };
  Eigen::VectorXd w0(2);
  w0 << std::log(prev.phi), std::log(std::max(prev.nu2(), 1e-10));
  const Eigen::VectorXd w = nelder_mead(neg_profile, w0, 0.15, 1e-10, 400);

  SclParams next;
  next.beta = beta;
  next.sigma2 = sigma2;
  next.phi = std::exp(w[0]);
  next.tau2 = std::exp(w[1]) * sigma2;
  return next;
}

double observed_loglik(const SclDataset& data, const SclParams& params,
                       long n_mc, std::uint64_t seed) {
  data.validate();
  params.validate();
  std::vector<int> cens_idx, obs_idx;
  split_indices(data, cens_idx, obs_idx);
  const int no = static_cast<int>(obs_idx.size());
  const int nc = static_cast<int>(cens_idx.size());

  double ll = 0.0;
  if (no > 0) {
    const Eigen::MatrixXd sigma =
        params.sigma2 * psi_matrix(data, params.phi, params.nu2());
    const Eigen::VectorXd mu = data.design * params.beta;
    Eigen::MatrixXd s_oo(no, no);
    Eigen::VectorXd v_o(no), mu_o(no);
    for (int i = 0; i < no; ++i) {
      v_o[i] = data.observed[obs_idx[i]];
      mu_o[i] = mu[obs_idx[i]];
      for (int k = 0; k < no; ++k) s_oo(i, k) = sigma(obs_idx[i], obs_idx[k]);
    }
    ll += mvn_logpdf(v_o, mu_o, s_oo);
  }
  if (nc == 0) return ll;

  // Pr(Z_c in box | observed) by separation-of-variables Monte Carlo
  // (Genz 1992) with antithetic pairs: each replicate sweeps the Cholesky
  // factor, accumulating a product of conditional interval probabilities.
  // Unlike a raw indicator estimate this stays positive in high dimension.
  const ConditionalNormal cond =
      censored_conditional(data, params, cens_idx, obs_idx);
  Eigen::LLT<Eigen::MatrixXd> llt(cond.cov);
  if (llt.info() != Eigen::Success)
    throw InvalidParameterError("observed_loglik: conditional covariance not "
                                "positive-definite");
  const Eigen::MatrixXd chol_l = llt.matrixL();
  Eigen::VectorXd lo(nc), hi(nc);
  for (int i = 0; i < nc; ++i) {
    lo[i] = data.v_lower[cens_idx[i]] - cond.mean[i];
    hi[i] = data.v_upper[cens_idx[i]] - cond.mean[i];
  }

  Philox rng(seed);
  Eigen::VectorXd y(nc);
  auto sov_replicate = [&](const Eigen::VectorXd& w) {
    double f = 1.0;
    for (int i = 0; i < nc && f > 0.0; ++i) {
      double shift = 0.0;
      for (int j = 0; j < i; ++j) shift += chol_l(i, j) * y[j];
      const double d =
          std::isfinite(lo[i]) ? norm_cdf((lo[i] - shift) / chol_l(i, i)) : 0.0;
      const double e =
          std::isfinite(hi[i]) ? norm_cdf((hi[i] - shift) / chol_l(i, i)) : 1.0;
      f *= std::max(e - d, 0.0);
      if (i + 1 < nc) {
        const double t = d + w[i] * (e - d);
        y[i] = norm_quantile(std::min(std::max(t, 1e-16), 1.0 - 1e-16));
      }
    }
    return f;
  };

  const long pairs = (n_mc + 1) / 2;
  double acc = 0.0;
  Eigen::VectorXd w(std::max(nc - 1, 1));
  for (long it = 0; it < pairs; ++it) {
    for (int i = 0; i < nc - 1; ++i) w[i] = rng.uniform();
    acc += sov_replicate(w);
    acc += sov_replicate(Eigen::VectorXd::Ones(w.size()) - w);
  }
  const double prob = acc / (2.0 * pairs);
  return ll + std::log(prob);
}

SclFit fit_mcem(const SclDataset& data, const SclParams& init,
                const SclFitOptions& opt) {
  data.validate();
  init.validate();
  if (opt.iters < 1) throw InvalidParameterError("fit_mcem: iters must be >= 1");
  if (opt.burn_in >= opt.iters)
    throw InvalidParameterError("fit_mcem: trace burn-in must be < iters");
  if (opt.thinning < 1)
    throw InvalidParameterError("fit_mcem: thinning must be >= 1");
  if (opt.n_mc_start < 1 || opt.n_mc_end < opt.n_mc_start)
    throw InvalidParameterError("fit_mcem: n_mc schedule must be constant or "
                                "increasing");

  const int q = data.q();
  SclFit fit;
  fit.trace.resize(opt.iters, q + 3);
  SclParams cur = init;

  for (int k = 0; k < opt.iters; ++k) {
    const long n_mc =
        opt.iters == 1
            ? opt.n_mc_end
            : opt.n_mc_start + static_cast<long>(std::llround(
                                   static_cast<double>(opt.n_mc_end -
                                                       opt.n_mc_start) *
                                   k / (opt.iters - 1)));
    const EStepResult e =
        e_step(data, cur, n_mc, derive_seed(opt.seed, static_cast<std::uint64_t>(k)));
    cur = m_step(data, e.zhat, e.zzhat, cur);
    fit.trace.row(k).head(q) = cur.beta.transpose();
    fit.trace(k, q) = cur.sigma2;
    fit.trace(k, q + 1) = cur.phi;
    fit.trace(k, q + 2) = cur.tau2;
  }

  // final estimate: mean of the thinned post-burn-in trace
  Eigen::RowVectorXd avg = Eigen::RowVectorXd::Zero(q + 3);
  long used = 0;
  for (int k = opt.burn_in + opt.thinning - 1; k < opt.iters;
       k += opt.thinning) {
    avg += fit.trace.row(k);
    ++used;
  }
  if (used == 0) {  // short trace: fall back to every post-burn-in row
    for (int k = opt.burn_in; k < opt.iters; ++k) {
      avg += fit.trace.row(k);
      ++used;
    }
  }
  avg /= static_cast<double>(used);

  fit.params.beta = avg.head(q).transpose();
  fit.params.sigma2 = avg[q];
  fit.params.phi = avg[q + 1];
  fit.params.tau2 = avg[q + 2];
  fit.n_params = q + 3;
  fit.loglik = observed_loglik(data, fit.params, opt.loglik_n_mc,
                               derive_seed(opt.seed, 0x10EC11Cull));
  fit.aic = -2.0 * fit.loglik + 2.0 * fit.n_params;
  fit.bic = -2.0 * fit.loglik + fit.n_params * std::log(data.n());
  return fit;
}

}  // namespace trellip

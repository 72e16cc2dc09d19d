#include "trellip/moments.hpp"

#include <cmath>
#include <sstream>

#include "trellip/special.hpp"

namespace trellip {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void gate_existence(const ExistenceRecord& rec, bool allow_divergent) {
  if (!allow_divergent && (!rec.mean_exists || !rec.cov_exists))
    throw ExistenceError(rec.reason);
}

// E(delta1 | X1 in A1) via the trace identity (exact given xi1, omega11).
double expected_delta1(const PartitionedSpec& part, const Eigen::VectorXd& xi1,
                       const Eigen::MatrixXd& omega11) {
  const Eigen::LLT<Eigen::MatrixXd> llt(part.s11);
  const Eigen::MatrixXd s11inv_omega = llt.solve(omega11);
  const Eigen::VectorXd diff = xi1 - part.mu1;
  return s11inv_omega.trace() + diff.dot(llt.solve(diff));
}

// omega_{2.1} of the untruncated family (empty block-1 limit).
double omega_untruncated(const Family& fam, int p) {
  switch (fam.kind()) {
    case FamilyKind::kNormal:
      return 1.0;
    case FamilyKind::kStudentT:
      return fam.nu() / (fam.nu() - 2.0);
    case FamilyKind::kPearsonVII:
      return fam.pvii_nu() / (2.0 * fam.pvii_m() - p - 2.0);
    case FamilyKind::kSlash:
      return fam.nu() / (fam.nu() - 1.0);
    case FamilyKind::kContaminatedNormal:
      return fam.cn_nu() / fam.cn_rho() + 1.0 - fam.cn_nu();
    default:
      return kNaN;
  }
}

MomentEstimate from_samples(const Eigen::MatrixXd& samples) {
  MomentEstimate est;
  const long n = samples.rows();
  est.mean = samples.colwise().mean();
  est.second_moment = samples.transpose() * samples / static_cast<double>(n);
  est.second_moment =
      0.5 * (est.second_moment + est.second_moment.transpose().eval());
  est.cov = est.second_moment - est.mean * est.mean.transpose();
  est.n_used = n;
  return est;
}

}  // namespace

ExistenceRecord existence_check(const Family& family,
                                const PartitionedSpec& part) {
  ExistenceRecord rec;
  const int p = part.dim();
  const int d = part.doubly_truncated();
  const int p2e = p - d;
  if (d == p) {
    rec.reason = "bounded truncation region: all moments finite";
    return rec;
  }
  std::ostringstream why;
  switch (family.kind()) {
    case FamilyKind::kStudentT: {
      const double nu = family.nu();
      rec.mean_exists = nu + d > 1.0;
      rec.cov_exists = nu + d > 2.0;
      why << "Student-t with nu=" << nu << " and " << d
          << " doubly truncated coordinate(s): mean needs nu+d>1, "
             "covariance needs nu+d>2";
      break;
    }
    case FamilyKind::kPearsonVII: {
      const double m = family.pvii_m();
      rec.mean_exists = m > 0.5 * (p2e + 1);
      rec.cov_exists = m > 0.5 * (p2e + 2);
      why << "Pearson VII with m=" << m << " and " << d
          << " doubly truncated coordinate(s): mean needs m>(p-d+1)/2="
          << 0.5 * (p2e + 1) << ", covariance needs m>(p-d+2)/2="
          << 0.5 * (p2e + 2);
      if (!rec.cov_exists && rec.mean_exists && d >= 1 &&
          m > 0.5 * (p2e + 1))
        why << "; cross-covariances with the bounded block stay finite, the "
               "free-block variances diverge";
      break;
    }
    case FamilyKind::kSlash: {
      rec.cov_exists = family.nu() > 1.0;
      why << "slash with nu=" << family.nu()
          << ": covariance needs nu>1 outside a bounded region";
      break;
    }
    case FamilyKind::kCustom:
      why << "custom dgf: no analytic existence rule, assumed finite";
      break;
    default:
      why << "moments finite for this family";
      break;
  }
  rec.reason = why.str();
  return rec;
}

double omega21(const Family& family, const PartitionedSpec& part,
               const Eigen::MatrixXd& chain1, const Eigen::VectorXd& xi1,
               const Eigen::MatrixXd& omega11, OmegaDiagnostics* diag) {
  const int p1 = part.p1(), p2 = part.p2();
  switch (family.kind()) {
    case FamilyKind::kNormal:
      return 1.0;
    case FamilyKind::kStudentT: {
      const double nu = family.nu();
      const double denom = nu + p1 - 2.0;
      if (!(denom > 0.0))
        throw ExistenceError("omega21: Student-t requires nu + p1 > 2 when a "
                             "free block is present");
      const double ed = p1 > 0 ? expected_delta1(part, xi1, omega11) : 0.0;
      return (nu + ed) / denom;
    }
    case FamilyKind::kPearsonVII: {
      const double denom = 2.0 * family.pvii_m() - p2 - 2.0;
      if (!(denom > 0.0))
        throw ExistenceError("omega21: Pearson VII requires 2m - p2 > 2");
      const double ed = p1 > 0 ? expected_delta1(part, xi1, omega11) : 0.0;
      return (family.pvii_nu() + ed) / denom;
    }
    case FamilyKind::kSlash: {
      const double nu = family.nu();
      if (!(nu > 1.0))
        throw ExistenceError("omega21: slash requires nu > 1");
      if (p1 == 0) return nu / (nu - 1.0);
      // E[ SL(x1; nu-1) / SL(x1; nu) ] * nu/(nu-1); the normalizing
      // constants of the two slash densities reduce the ratio to dgf values
      // scaled by (nu-1)/nu, evaluated in log space.
      const Family num = Family::slash(nu - 1.0, p1);
      const Family den = Family::slash(nu, p1);
      const Eigen::LLT<Eigen::MatrixXd> llt(part.s11);
      long dropped = 0;
      double acc = 0.0;
      for (long i = 0; i < chain1.rows(); ++i) {
        const double d1 =
            llt.matrixL().solve(chain1.row(i).transpose() - part.mu1)
                .squaredNorm();
        const double lr = std::log(dgf_eval(num, d1)) -
                          std::log(dgf_eval(den, d1));
        if (!std::isfinite(lr)) {
          ++dropped;
          continue;
        }
        acc += std::exp(lr);
      }
      const long used = chain1.rows() - dropped;
      if (used == 0)
        throw ConvergenceError("omega21: every slash density ratio underflowed");
      if (diag) {
        diag->dropped = dropped;
        if (dropped * 100 > chain1.rows())
          diag->warning = "omega21: more than 1% of slash density ratios "
                          "underflowed and were dropped";
      }
      return acc / static_cast<double>(used);
    }
    case FamilyKind::kContaminatedNormal: {
      const double nu = family.cn_nu(), rho = family.cn_rho();
      double nu21_bar = nu;
      if (p1 > 0) {
        const Eigen::MatrixXd s11_infl = part.s11 / rho;
        const Eigen::LLT<Eigen::MatrixXd> llt_infl(s11_infl);
        const Eigen::LLT<Eigen::MatrixXd> llt(part.s11);
        double acc = 0.0;
        for (long i = 0; i < chain1.rows(); ++i) {
          const Eigen::VectorXd x1 = chain1.row(i).transpose();
          const double lw1 = std::log(nu) + mvn_logpdf(x1, part.mu1, llt_infl);
          const double lw2 =
              std::log1p(-nu) + mvn_logpdf(x1, part.mu1, llt);
          acc += 1.0 / (1.0 + std::exp(lw2 - lw1));
        }
        nu21_bar = acc / static_cast<double>(chain1.rows());
      }
      return nu21_bar / rho + 1.0 - nu21_bar;
    }
    default:
      throw InvalidParameterError(
          "omega21: no closed omega for this family; use the full route");
  }
}

MomentEstimate mc_moments_full(const TruncEllipticalSpec& spec,
                               const MomentOptions& opt) {
  spec.validate();
  const PartitionedSpec part = split(spec);
  const ExistenceRecord rec = existence_check(spec.family, part);
  gate_existence(rec, opt.allow_divergent);
  const Chain chain =
      slice_gibbs_sample(spec, opt.n, opt.burn_in, opt.thinning, opt.seed);
  MomentEstimate est = from_samples(chain.samples);
  est.existence = rec;
  if (opt.allow_divergent && (!rec.mean_exists || !rec.cov_exists))
    est.warning = "divergent moments requested: estimate is unreliable";
  return est;
}

MomentEstimate mc_moments_partitioned(const TruncEllipticalSpec& spec,
                                      const MomentOptions& opt) {
  spec.validate();
  const PartitionedSpec part = split(spec);
  const ExistenceRecord rec = existence_check(spec.family, part);
  gate_existence(rec, opt.allow_divergent);

  const int p = spec.dim(), p1 = part.p1(), p2 = part.p2();

  // Families without closed marginals take the full-vector route.
  if (p1 >= 1) {
    switch (spec.family.kind()) {
      case FamilyKind::kPowerExponential:
      case FamilyKind::kKotz:
      case FamilyKind::kCustom:
        return mc_moments_full(spec, opt);
      default:
        break;
    }
  }

  MomentEstimate est;
  est.existence = rec;

  if (p1 == 0) {
    // nothing truncated: moments are exact, no sampling needed
    switch (spec.family.kind()) {
      case FamilyKind::kPowerExponential:
      case FamilyKind::kKotz:
      case FamilyKind::kCustom:
        return mc_moments_full(spec, opt);
      default:
        break;
    }
    est.mean = spec.mu;
    est.omega21 = omega_untruncated(spec.family, p);
    const double w = est.omega21;
    est.cov = rec.cov_exists
                  ? Eigen::MatrixXd(w * spec.sigma)
                  : Eigen::MatrixXd::Constant(p, p, kNaN);
    if (!rec.mean_exists) est.mean.setConstant(kNaN);
    est.second_moment = est.cov + est.mean * est.mean.transpose();
    est.n_used = 0;
  } else if (p2 == 0) {
    // fully truncated: plain Monte Carlo over the whole vector
    return mc_moments_full(spec, opt);
  } else {
    const std::optional<Family> marg = marginal_family(part);
    if (!marg) return mc_moments_full(spec, opt);
    TruncEllipticalSpec spec1{part.mu1, part.s11, part.a1, part.b1, *marg};
    const Chain chain1 =
        slice_gibbs_sample(spec1, opt.n, opt.burn_in, opt.thinning, opt.seed);

    const Eigen::VectorXd xi1 = chain1.samples.colwise().mean();
    Eigen::MatrixXd m2 = chain1.samples.transpose() * chain1.samples /
                         static_cast<double>(chain1.n());
    m2 = 0.5 * (m2 + m2.transpose().eval());
    const Eigen::MatrixXd omega11 = m2 - xi1 * xi1.transpose();

    OmegaDiagnostics diag;
    double w = kNaN;
    try {
      w = omega21(spec.family, part, chain1.samples, xi1, omega11, &diag);
    } catch (const Error&) {
      if (!opt.allow_divergent) throw;
    }
    est.warning = diag.warning;

    const Eigen::LLT<Eigen::MatrixXd> llt(part.s11);
    const Eigen::MatrixXd regression = llt.solve(part.s12).transpose();
    const Eigen::VectorXd mean2 = part.mu2 + regression * (xi1 - part.mu1);
    const Eigen::MatrixXd s21_base = part.s22 - regression * part.s12;
    const Eigen::MatrixXd c12 = omega11 * llt.solve(part.s12);
    const Eigen::MatrixXd c22 =
        w * s21_base + regression * omega11 * regression.transpose();

    est.mean.resize(p);
    est.cov.resize(p, p);
    for (int i = 0; i < p1; ++i) {
      est.mean[part.idx_trunc[i]] = xi1[i];
      for (int k = 0; k < p1; ++k)
        est.cov(part.idx_trunc[i], part.idx_trunc[k]) = omega11(i, k);
      for (int k = 0; k < p2; ++k) {
        est.cov(part.idx_trunc[i], part.idx_free[k]) = c12(i, k);
        est.cov(part.idx_free[k], part.idx_trunc[i]) = c12(i, k);
      }
    }
    for (int i = 0; i < p2; ++i) {
      est.mean[part.idx_free[i]] = mean2[i];
      for (int k = 0; k < p2; ++k)
        est.cov(part.idx_free[i], part.idx_free[k]) =
            0.5 * (c22(i, k) + c22(k, i));
    }
    est.omega21 = w;
    est.second_moment = est.cov + est.mean * est.mean.transpose();
    est.n_used = chain1.n();
  }

  if (opt.allow_divergent && (!rec.mean_exists || !rec.cov_exists)) {
    est.warning = est.warning.empty()
                      ? "divergent moments requested: estimate is unreliable"
                      : est.warning +
                            "; divergent moments requested: estimate is "
                            "unreliable";
  }
  return est;
}

}  // namespace trellip

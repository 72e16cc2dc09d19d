#include "trellip/partition.hpp"

#include <cmath>

#include "trellip/special.hpp"

namespace trellip {

namespace {

Eigen::LLT<Eigen::MatrixXd> llt_of(const Eigen::MatrixXd& m, const char* what) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success)
    throw InvalidParameterError(std::string(what) +
                                ": block not positive-definite");
  return llt;
}

}  // namespace

int PartitionedSpec::doubly_truncated() const {
  int d = 0;
  for (int i = 0; i < p1(); ++i)
    if (std::isfinite(a1[i]) && std::isfinite(b1[i])) ++d;
  return d;
}

PartitionedSpec split(const TruncEllipticalSpec& spec) {
  spec.validate();
  const int p = spec.dim();
  PartitionedSpec part(spec.family);
  for (int j = 0; j < p; ++j) {
    if (std::isfinite(spec.lower[j]) || std::isfinite(spec.upper[j]))
      part.idx_trunc.push_back(j);
    else
      part.idx_free.push_back(j);
  }
  const int p1 = part.p1(), p2 = part.p2();
  part.mu1.resize(p1);
  part.a1.resize(p1);
  part.b1.resize(p1);
  part.mu2.resize(p2);
  part.s11.resize(p1, p1);
  part.s22.resize(p2, p2);
  part.s12.resize(p1, p2);
  part.s21.resize(p2, p1);
  for (int i = 0; i < p1; ++i) {
    const int gi = part.idx_trunc[i];
    part.mu1[i] = spec.mu[gi];
    part.a1[i] = spec.lower[gi];
    part.b1[i] = spec.upper[gi];
    for (int k = 0; k < p1; ++k) part.s11(i, k) = spec.sigma(gi, part.idx_trunc[k]);
    for (int k = 0; k < p2; ++k) part.s12(i, k) = spec.sigma(gi, part.idx_free[k]);
  }
  for (int i = 0; i < p2; ++i) {
    const int gi = part.idx_free[i];
    part.mu2[i] = spec.mu[gi];
    for (int k = 0; k < p2; ++k) part.s22(i, k) = spec.sigma(gi, part.idx_free[k]);
  }
  part.s21 = part.s12.transpose();
  return part;
}

double mahalanobis1(const Eigen::VectorXd& x1, const PartitionedSpec& part) {
  if (x1.size() != part.p1())
    throw InvalidParameterError("mahalanobis1: x1 has wrong length");
  if (part.p1() == 0) return 0.0;
  const auto llt = llt_of(part.s11, "mahalanobis1");
  return llt.matrixL().solve(x1 - part.mu1).squaredNorm();
}

ConditionalParams conditional_params(const PartitionedSpec& part,
                                     const Eigen::VectorXd& x1) {
  const int p1 = part.p1(), p2 = part.p2();
  if (p1 == 0 || p2 == 0)
    throw InvalidParameterError(
        "conditional_params: both blocks must be nonempty");
  if (x1.size() != p1)
    throw InvalidParameterError("conditional_params: x1 has wrong length");

  const auto llt = llt_of(part.s11, "conditional_params");
  Eigen::MatrixXd regression = llt.solve(part.s12).transpose();  // p2 x p1
  Eigen::VectorXd mu21 = part.mu2 + regression * (x1 - part.mu1);
  Eigen::MatrixXd s21_base = part.s22 - regression * part.s12;
  s21_base = 0.5 * (s21_base + s21_base.transpose().eval());

  const Family& fam = part.family;
  const double delta1 = llt.matrixL().solve(x1 - part.mu1).squaredNorm();

  switch (fam.kind()) {
    case FamilyKind::kNormal:
      return {mu21, s21_base, regression, Family::normal(p2), 1.0};
    case FamilyKind::kStudentT: {
      const double nu = fam.nu();
      const double lambda = (nu + delta1) / (nu + p1);
      return {mu21, s21_base, regression, Family::student_t(nu + p1, p2),
              lambda};
    }
    case FamilyKind::kPearsonVII:
      return {mu21, s21_base, regression,
              Family::pearson_vii(fam.pvii_m(), fam.pvii_nu() + delta1, p2),
              1.0};
    case FamilyKind::kSlash: {
      // dgf of the conditional: the slash integrand with its argument
      // shifted by delta1 and exponent using the full dimension p.
      const double nu = fam.nu();
      const int p = part.dim();
      Family slash_full = Family::slash(nu, p);
      auto g = [slash_full, delta1](double t) {
        return dgf_eval(slash_full, t + delta1);
      };
      return {mu21, s21_base, regression, Family::custom(std::move(g), p2),
              1.0};
    }
    case FamilyKind::kContaminatedNormal: {
      // mixture weight of the inflated component given x1, in log space
      const double nu = fam.cn_nu(), rho = fam.cn_rho();
      const Eigen::MatrixXd s11_infl = part.s11 / rho;
      const double lw1 =
          std::log(nu) + mvn_logpdf(x1, part.mu1, s11_infl);
      const double lw2 =
          std::log1p(-nu) + mvn_logpdf(x1, part.mu1, part.s11);
      const double nu21 = 1.0 / (1.0 + std::exp(lw2 - lw1));
      return {mu21, s21_base, regression,
              Family::contaminated_normal(nu21, rho, p2), 1.0};
    }
    case FamilyKind::kPowerExponential: {
      const double beta = fam.pe_beta();
      auto g = [beta, delta1](double t) {
        return std::exp(-0.5 * std::pow(t + delta1, beta));
      };
      return {mu21, s21_base, regression, Family::custom(std::move(g), p2),
              1.0};
    }
    default:
      throw InvalidParameterError(
          "conditional_params: no conditional family for Kotz/custom dgfs");
  }
}

std::optional<Family> marginal_family(const PartitionedSpec& part) {
  const int p1 = part.p1(), p2 = part.p2();
  if (p1 < 1)
    throw InvalidParameterError("marginal_family: requires p1 >= 1");
  const Family& fam = part.family;
  switch (fam.kind()) {
    case FamilyKind::kNormal:
      return Family::normal(p1);
    case FamilyKind::kStudentT:
      return Family::student_t(fam.nu(), p1);
    case FamilyKind::kPearsonVII: {
      const double m1 = fam.pvii_m() - 0.5 * p2;
      if (!(m1 > 0.5 * p1))
        throw InvalidParameterError(
            "marginal_family: Pearson VII marginal violates m - p2/2 > p1/2");
      return Family::pearson_vii(m1, fam.pvii_nu(), p1);
    }
    case FamilyKind::kSlash:
      return Family::slash(fam.nu(), p1);
    case FamilyKind::kContaminatedNormal:
      return Family::contaminated_normal(fam.cn_nu(), fam.cn_rho(), p1);
    default:
      return std::nullopt;  // power exponential, Kotz, custom: not closed
  }
}

}  // namespace trellip

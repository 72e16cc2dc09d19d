#include "trellip/family.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "trellip/hash.hpp"
#include "trellip/quadrature.hpp"
#include "trellip/rootfind.hpp"
#include "trellip/special.hpp"

namespace trellip {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, const char* msg) {
  if (!ok) throw InvalidParameterError(msg);
}

// Slash dgf g(t) = int_0^1 u^{alpha-1} exp(-u t / 2) du with alpha = nu + p/2.
// The incomplete-gamma closed form (2/t)^alpha * gamma(alpha, t/2) is used
// when alpha is integral, and also when alpha < 1 where the quadrature
// integrand is singular at u = 0; otherwise adaptive Gauss-Kronrod with
// relative tolerance 1e-10. The relative tolerance matters: the sampler
// inverts g deep in its tail where values sit far below any absolute cutoff.
double slash_dgf(double t, double nu, int p) {
  const double alpha = nu + 0.5 * p;
  if (t == 0.0) return 1.0 / alpha;
  const bool integral_alpha = std::fabs(alpha - std::round(alpha)) < 1e-12;
  if (integral_alpha || alpha < 1.0)
    return std::exp(std::lgamma(alpha) + alpha * std::log(2.0 / t) +
                    log_gamma_p(alpha, 0.5 * t));
  return adaptive_gauss_kronrod(
      [alpha, t](double u) {
        return std::pow(u, alpha - 1.0) * std::exp(-0.5 * u * t);
      },
      0.0, 1.0, 1e-300, 1e-10);
}

double kotz_dgf(double t, double r, double s, double n_shape) {
  if (t == 0.0) return n_shape < 1.0 ? kInf : 1.0;
  return std::exp((n_shape - 1.0) * std::log(t) - r * std::pow(t, s));
}

double cn_dgf(double t, double nu, double rho, int p) {
  return nu * std::pow(rho, 0.5 * p) * std::exp(-0.5 * rho * t) +
         (1.0 - nu) * std::exp(-0.5 * t);
}

// Doubling search for an upper bracket with g(hi) < y.
template <typename G>
double bracket_above(G&& g, double y, double hi0) {
  double hi = hi0;
  for (int i = 0; i < 1200; ++i) {
    if (g(hi) < y) return hi;
    hi *= 2.0;
  }
  throw ConvergenceError("dgf_inverse: failed to bracket the root from above");
}

}  // namespace

Family Family::normal(int p) {
  require(p >= 1, "Family: dimension must be >= 1");
  return Family(FamilyKind::kNormal, {}, p);
}

Family Family::student_t(double nu, int p) {
  require(p >= 1, "Family: dimension must be >= 1");
  require(nu > 0.0, "student_t: nu must be > 0");
  return Family(FamilyKind::kStudentT, {nu, 0, 0}, p);
}

Family Family::power_exponential(double beta, int p) {
  require(p >= 1, "Family: dimension must be >= 1");
  require(beta > 0.0, "power_exponential: beta must be > 0");
  return Family(FamilyKind::kPowerExponential, {beta, 0, 0}, p);
}

Family Family::pearson_vii(double m, double nu, int p) {
  require(p >= 1, "Family: dimension must be >= 1");
  require(nu > 0.0, "pearson_vii: nu must be > 0");
  require(m > 0.5 * p, "pearson_vii: requires m > p/2");
  return Family(FamilyKind::kPearsonVII, {m, nu, 0}, p);
}

Family Family::slash(double nu, int p) {
  require(p >= 1, "Family: dimension must be >= 1");
  require(nu > 0.0, "slash: nu must be > 0");
  return Family(FamilyKind::kSlash, {nu, 0, 0}, p);
}

Family Family::contaminated_normal(double nu, double rho, int p) {
  require(p >= 1, "Family: dimension must be >= 1");
  require(nu > 0.0 && nu < 1.0, "contaminated_normal: nu must be in (0,1)");
  require(rho > 0.0 && rho < 1.0, "contaminated_normal: rho must be in (0,1)");
  return Family(FamilyKind::kContaminatedNormal, {nu, rho, 0}, p);
}

Family Family::kotz(double r, double s, double n_shape, int p) {
  require(p >= 1, "Family: dimension must be >= 1");
  require(r > 0.0 && s > 0.0, "kotz: requires r > 0 and s > 0");
  require(n_shape > 0.5 * (2.0 - p) && n_shape <= 1.0,
          "kotz: strict decrease requires (2-p)/2 < N <= 1");
  return Family(FamilyKind::kKotz, {r, s, n_shape}, p);
}

Family Family::custom(DgfFn g, DgfFn g_inv, int p) {
  require(p >= 1, "Family: dimension must be >= 1");
  require(static_cast<bool>(g), "custom: dgf callable required");
  if (!strictly_decreasing_on_grid(g))
    throw InvalidParameterError("custom: dgf is not strictly decreasing");
  Family f(FamilyKind::kCustom, {}, p);
  f.g_ = std::move(g);
  f.g_inv_ = std::move(g_inv);
  return f;
}

Family Family::with_dim(int p) const {
  switch (kind_) {
    case FamilyKind::kNormal:
      return normal(p);
    case FamilyKind::kStudentT:
      return student_t(par_[0], p);
    case FamilyKind::kPowerExponential:
      return power_exponential(par_[0], p);
    case FamilyKind::kPearsonVII:
      return pearson_vii(par_[0], par_[1], p);
    case FamilyKind::kSlash:
      return slash(par_[0], p);
    case FamilyKind::kContaminatedNormal:
      return contaminated_normal(par_[0], par_[1], p);
    case FamilyKind::kKotz:
      return kotz(par_[0], par_[1], par_[2], p);
    case FamilyKind::kCustom: {
      Family f(FamilyKind::kCustom, {}, p);
      f.g_ = g_;
      f.g_inv_ = g_inv_;
      return f;
    }
  }
  throw InvalidParameterError("Family: unknown kind");
}

std::uint64_t Family::digest(std::uint64_t h) const {
  const int k = static_cast<int>(kind_);
  h = fnv1a(&k, sizeof(k), h);
  h = fnv1a(&p_, sizeof(p_), h);
  for (double v : par_) h = fnv1a(v, h);
  return h;
}

std::string Family::label() const {
  std::ostringstream os;
  switch (kind_) {
    case FamilyKind::kNormal:
      os << "normal";
      break;
    case FamilyKind::kStudentT:
      os << "t(nu=" << par_[0] << ")";
      break;
    case FamilyKind::kPowerExponential:
      os << "pe(beta=" << par_[0] << ")";
      break;
    case FamilyKind::kPearsonVII:
      os << "pvii(m=" << par_[0] << ",nu=" << par_[1] << ")";
      break;
    case FamilyKind::kSlash:
      os << "slash(nu=" << par_[0] << ")";
      break;
    case FamilyKind::kContaminatedNormal:
      os << "cn(nu=" << par_[0] << ",rho=" << par_[1] << ")";
      break;
    case FamilyKind::kKotz:
      os << "kotz(r=" << par_[0] << ",s=" << par_[1] << ",N=" << par_[2]
         << ")";
      break;
    case FamilyKind::kCustom:
      os << "custom";
      break;
  }
  return os.str();
}

double dgf_eval(const Family& family, double t) {
  if (!(t >= 0.0)) throw InvalidParameterError("dgf_eval: requires t >= 0");
  switch (family.kind()) {
    case FamilyKind::kNormal:
      return std::exp(-0.5 * t);
    case FamilyKind::kStudentT:
      return std::pow(1.0 + t / family.nu(),
                      -0.5 * (family.nu() + family.dim()));
    case FamilyKind::kPowerExponential:
      return std::exp(-0.5 * std::pow(t, family.pe_beta()));
    case FamilyKind::kPearsonVII:
      return std::pow(1.0 + t / family.pvii_nu(), -family.pvii_m());
    case FamilyKind::kSlash:
      return slash_dgf(t, family.nu(), family.dim());
    case FamilyKind::kContaminatedNormal:
      return cn_dgf(t, family.cn_nu(), family.cn_rho(), family.dim());
    case FamilyKind::kKotz:
      return kotz_dgf(t, family.kotz_r(), family.kotz_s(), family.kotz_n());
    case FamilyKind::kCustom:
      return family.custom_g()(t);
  }
  throw InvalidParameterError("dgf_eval: unknown family");
}

double dgf_inverse(const Family& family, double y) {
  if (!(y > 0.0)) throw InvalidParameterError("dgf_inverse: requires y > 0");
  const double g0 = dgf_eval(family, 0.0);
  if (std::isfinite(g0)) {
    if (y > g0 * (1.0 + 1e-12))
      throw InvalidParameterError("dgf_inverse: y above g(0)");
    if (y >= g0) return 0.0;
  }
  switch (family.kind()) {
    case FamilyKind::kNormal:
      return -2.0 * std::log(y);
    case FamilyKind::kStudentT: {
      const double nu = family.nu();
      return nu * (std::pow(y, -2.0 / (nu + family.dim())) - 1.0);
    }
    case FamilyKind::kPowerExponential:
      return std::pow(-2.0 * std::log(y), 1.0 / family.pe_beta());
    case FamilyKind::kPearsonVII: {
      const double nu = family.pvii_nu();
      return nu * (std::pow(y, -1.0 / family.pvii_m()) - 1.0);
    }
    case FamilyKind::kContaminatedNormal: {
      const double nu = family.cn_nu(), rho = family.cn_rho();
      const double c1 = nu * std::pow(rho, 0.5 * family.dim());
      auto g = [&](double t) {
        return c1 * std::exp(-0.5 * rho * t) + (1.0 - nu) * std::exp(-0.5 * t);
      };
      auto dg = [&](double t) {
        return -0.5 * (c1 * rho * std::exp(-0.5 * rho * t) +
                       (1.0 - nu) * std::exp(-0.5 * t));
      };
      const double x0 = -2.0 * std::log(y);
      const double hi = bracket_above(g, y, std::max(1.0, x0));
      return newton_bisect([&](double t) { return g(t) - y; }, dg, x0, 0.0,
                           hi);
    }
    case FamilyKind::kSlash: {
      auto g = [&](double t) { return slash_dgf(t, family.nu(), family.dim()); };
      const double hi = bracket_above(g, y, 1.0);
      return brent([&](double t) { return g(t) - y; }, 0.0, hi, 1e-10);
    }
    case FamilyKind::kKotz: {
      // Solve (N-1) w - r e^{s w} = log y in w = log t; Newton is well
      // scaled here even where g itself is huge or tiny.
      const double r = family.kotz_r(), s = family.kotz_s(),
                   n_shape = family.kotz_n();
      const double ly = std::log(y);
      auto h = [&](double w) {
        return (n_shape - 1.0) * w - r * std::exp(s * w) - ly;
      };
      auto dh = [&](double w) {
        return (n_shape - 1.0) - r * s * std::exp(s * w);
      };
      double wlo = 0.0;
      for (int i = 0; h(wlo) < 0.0; ++i) {  // g(1) < y: walk toward t = 0
        if (i > 1200)
          throw ConvergenceError("dgf_inverse: kotz bracket failed");
        wlo -= 1.0;
      }
      double whi = wlo + 1.0;
      for (int i = 0; h(whi) > 0.0; ++i) {
        if (i > 1200)
          throw ConvergenceError("dgf_inverse: kotz bracket failed");
        whi += 1.0;
      }
      const double w = newton_bisect(h, dh, 0.5 * (wlo + whi), wlo, whi,
                                     1e-14);
      return std::exp(w);
    }
    case FamilyKind::kCustom: {
      if (family.custom_g_inv()) return family.custom_g_inv()(y);
      const DgfFn& g = family.custom_g();
      const double hi = bracket_above(g, y, 1.0);
      return brent([&](double t) { return g(t) - y; }, 0.0, hi, 1e-10);
    }
    default:
      throw InvalidParameterError("dgf_inverse: unknown family");
  }
}

bool validate_strictly_decreasing(const Family& family) {
  switch (family.kind()) {
    case FamilyKind::kNormal:
    case FamilyKind::kStudentT:
    case FamilyKind::kPowerExponential:
    case FamilyKind::kPearsonVII:
    case FamilyKind::kSlash:
    case FamilyKind::kContaminatedNormal:
      return true;  // strictly decreasing for every accepted parameter set
    case FamilyKind::kKotz:
      return family.kotz_r() > 0.0 && family.kotz_s() > 0.0 &&
             family.kotz_n() > 0.5 * (2.0 - family.dim()) &&
             family.kotz_n() <= 1.0;
    case FamilyKind::kCustom:
      return strictly_decreasing_on_grid(family.custom_g());
  }
  return false;
}

bool strictly_decreasing_on_grid(const DgfFn& g) {
  const double g0 = g(0.0);
  if (!(g0 > 0.0) || !std::isfinite(g0)) return false;
  double t_max = 1.0;
  for (int i = 0; i < 40 && !(g(t_max) < 1e-12 * g0); ++i) t_max *= 2.0;
  // 512 points: 0 plus 511 log-spaced over eight decades up to t_max.
  double prev = g0;
  for (int i = 1; i < 512; ++i) {
    const double t = t_max * std::pow(10.0, -8.0 * (511 - i) / 510.0);
    const double gt = g(t);
    if (!std::isfinite(gt) || !(gt < prev)) return false;
    prev = gt;
  }
  return true;
}

}  // namespace trellip

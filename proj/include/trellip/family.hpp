#ifndef TRELLIP_FAMILY_HPP
#define TRELLIP_FAMILY_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>

#include "trellip/errors.hpp"

namespace trellip {

using DgfFn = std::function<double(double)>;

enum class FamilyKind {
  kNormal,
  kStudentT,
  kPowerExponential,
  kPearsonVII,
  kSlash,
  kContaminatedNormal,
  kKotz,
  kCustom,
};

// Descriptor of the density generating function g(t) of a p-variate
// elliptical distribution: f(x) ~ g((x-mu)' Sigma^{-1} (x-mu)) up to a
// positive constant. Only ratios of g are ever needed, so no normalizing
// constant is computed anywhere.
//
// All dgf operations are pure; a Family may be shared freely across threads.
// Custom callables must themselves be re-entrant (caller contract).
class Family {
 public:
  static Family normal(int p);
  static Family student_t(double nu, int p);
  static Family power_exponential(double beta, int p);
  static Family pearson_vii(double m, double nu, int p);
  static Family slash(double nu, int p);
  static Family contaminated_normal(double nu, double rho, int p);
  // Kotz-type with g(t) = t^{n_shape-1} exp(-r t^s); strictly decreasing
  // requires r > 0, s > 0 and (2-p)/2 < n_shape <= 1.
  static Family kotz(double r, double s, double n_shape, int p);
  // Custom strictly decreasing dgf, validated on a log-spaced grid at
  // construction. g_inv is optional; pass nullptr to invert numerically.
  static Family custom(DgfFn g, DgfFn g_inv, int p);
  static Family custom(DgfFn g, int p) {
    return custom(std::move(g), nullptr, p);
  }

  FamilyKind kind() const { return kind_; }
  int dim() const { return p_; }

  double nu() const { return par_[0]; }        // t, slash
  double pe_beta() const { return par_[0]; }   // power exponential
  double pvii_m() const { return par_[0]; }    // Pearson VII
  double pvii_nu() const { return par_[1]; }
  double cn_nu() const { return par_[0]; }     // contaminated normal
  double cn_rho() const { return par_[1]; }
  double kotz_r() const { return par_[0]; }
  double kotz_s() const { return par_[1]; }
  double kotz_n() const { return par_[2]; }

  const DgfFn& custom_g() const { return g_; }
  const DgfFn& custom_g_inv() const { return g_inv_; }

  // Same family re-dimensioned (marginals/conditionals); revalidates.
  Family with_dim(int p) const;

  std::uint64_t digest(std::uint64_t h) const;
  std::string label() const;

 private:
  Family(FamilyKind kind, std::array<double, 3> par, int p)
      : kind_(kind), par_(par), p_(p) {}

  FamilyKind kind_;
  std::array<double, 3> par_{};
  int p_;
  DgfFn g_, g_inv_;
};

// g(t) for t >= 0. Kotz with n_shape < 1 diverges at t = 0 and returns +inf
// there; every other accepted family is finite and positive.
double dgf_eval(const Family& family, double t);

// kappa_y = g^{-1}(y) for 0 < y <= g(0). Closed forms where they exist
// (normal, t, power exponential, Pearson VII), safeguarded Newton for the
// contaminated normal, Brent for slash/Kotz/custom-without-inverse.
double dgf_inverse(const Family& family, double y);

// True iff g is strictly decreasing; analytic condition for built-ins,
// grid check for custom dgfs.
bool validate_strictly_decreasing(const Family& family);

// Grid check used for custom dgfs: 512 log-spaced points on [0, t_max] with
// t_max found by doubling until g(t_max) < 1e-12 * g(0).
bool strictly_decreasing_on_grid(const DgfFn& g);

}  // namespace trellip

#endif  // TRELLIP_FAMILY_HPP

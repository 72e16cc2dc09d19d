#ifndef TRELLIP_ROOTFIND_HPP
#define TRELLIP_ROOTFIND_HPP

#include <algorithm>
#include <cmath>

#include "trellip/errors.hpp"

namespace trellip {

// Brent's method on [a,b]; requires f(a) and f(b) of opposite sign.
template <typename F>
double brent(F&& f, double a, double b, double tol = 1e-10,
             int max_iter = 200) {
  double fa = f(a), fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if (fa * fb > 0.0)
    throw InvalidParameterError("brent: root not bracketed");
  double c = a, fc = fa, d = b - a, e = d;
  for (int it = 0; it < max_iter; ++it) {
    if (std::fabs(fc) < std::fabs(fb)) {
      a = b; b = c; c = a;
      fa = fb; fb = fc; fc = fa;
    }
    const double tol1 = 2.0 * 2.220446049250313e-16 * std::fabs(b) + 0.5 * tol;
    const double xm = 0.5 * (c - b);
    if (std::fabs(xm) <= tol1 || fb == 0.0) return b;
    if (std::fabs(e) >= tol1 && std::fabs(fa) > std::fabs(fb)) {
      // inverse quadratic / secant step
      const double s = fb / fa;
      double p, q;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        const double qq = fa / fc, r = fb / fc;
        p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
        q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::fabs(p);
      if (2.0 * p < std::min(3.0 * xm * q - std::fabs(tol1 * q),
                             std::fabs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += (std::fabs(d) > tol1) ? d : (xm > 0.0 ? tol1 : -tol1);
    fb = f(b);
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = b - a;
      e = d;
    }
  }
  throw ConvergenceError("brent: max iterations exceeded");
}

// Safeguarded Newton on a bracketing interval [lo,hi] with f(lo) >= 0 >= f(hi)
// for decreasing f (or the reverse); falls back to bisection whenever the
// Newton step leaves the bracket or stalls.
template <typename F, typename DF>
double newton_bisect(F&& f, DF&& df, double x0, double lo, double hi,
                     double tol = 1e-12, int max_iter = 200) {
  double flo = f(lo), fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (flo * fhi > 0.0)
    throw InvalidParameterError("newton_bisect: root not bracketed");
  double x = std::clamp(x0, lo, hi);
  double step_prev = hi - lo;
  for (int it = 0; it < max_iter; ++it) {
    const double fx = f(x);
    if (fx == 0.0) return x;
    if ((fx > 0.0) == (flo > 0.0)) {
      lo = x;
      flo = fx;
    } else {
      hi = x;
      fhi = fx;
    }
    const double dfx = df(x);
    double xn = x - fx / dfx;
    double step = std::fabs(xn - x);
    if (!(dfx != 0.0) || xn <= lo || xn >= hi || step > 0.5 * step_prev) {
      xn = 0.5 * (lo + hi);  // bisect on stall
      step = 0.5 * (hi - lo);
    }
    step_prev = step;
    x = xn;
    if (step <= tol * std::max(1.0, std::fabs(x))) return x;
    if (hi - lo <= tol * std::max(1.0, std::fabs(x))) return 0.5 * (lo + hi);
  }
  throw ConvergenceError("newton_bisect: max iterations exceeded");
}

}  // namespace trellip

#endif  // TRELLIP_ROOTFIND_HPP

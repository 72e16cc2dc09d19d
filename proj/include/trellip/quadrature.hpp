#ifndef TRELLIP_QUADRATURE_HPP
#define TRELLIP_QUADRATURE_HPP

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "trellip/errors.hpp"

namespace trellip {

namespace detail {

// Gauss-Kronrod 7-15 pair on [-1,1] (QUADPACK constants).
inline constexpr double kGkNodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.0};
inline constexpr double kKronrodW[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};
inline constexpr double kGaussW[4] = {0.129484966168870, 0.279705391489277,
                                      0.381830050505119, 0.417959183673469};

template <typename F>
std::pair<double, double> gk15(F& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  const double fc = f(c);
  double kron = kKronrodW[7] * fc;
  double gauss = kGaussW[3] * fc;
  for (int i = 0; i < 7; ++i) {
    const double fsum = f(c - h * kGkNodes[i]) + f(c + h * kGkNodes[i]);
    kron += kKronrodW[i] * fsum;
    if (i % 2 == 1) gauss += kGaussW[i / 2] * fsum;
  }
  return {h * kron, std::fabs(h * (kron - gauss))};
}

}  // namespace detail

// Globally adaptive Gauss-Kronrod integration of f on [a,b]: the segment with
// the largest error estimate is bisected until the summed estimate meets
// max(abs_tol, rel_tol*|integral|).
template <typename F>
double adaptive_gauss_kronrod(F&& f, double a, double b, double abs_tol = 1e-10,
                              double rel_tol = 1e-10, int max_segments = 512) {
  struct Segment {
    double a, b, value, error;
  };
  auto [v0, e0] = detail::gk15(f, a, b);
  std::vector<Segment> segs{{a, b, v0, e0}};
  double total = v0, total_err = e0;
  while (total_err > std::max(abs_tol, rel_tol * std::fabs(total))) {
    if (static_cast<int>(segs.size()) >= max_segments)
      throw QuadratureError("adaptive_gauss_kronrod: tolerance not reached");
    auto worst = std::max_element(
        segs.begin(), segs.end(),
        [](const Segment& s, const Segment& t) { return s.error < t.error; });
    const Segment s = *worst;
    const double mid = 0.5 * (s.a + s.b);
    auto [vl, el] = detail::gk15(f, s.a, mid);
    auto [vr, er] = detail::gk15(f, mid, s.b);
    total += vl + vr - s.value;
    total_err += el + er - s.error;
    *worst = {s.a, mid, vl, el};
    segs.push_back({mid, s.b, vr, er});
  }
  return total;
}

}  // namespace trellip

#endif  // TRELLIP_QUADRATURE_HPP

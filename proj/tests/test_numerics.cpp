#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "test_util.hpp"
#include "trellip/optimize.hpp"
#include "trellip/quadrature.hpp"
#include "trellip/rng.hpp"
#include "trellip/rootfind.hpp"
#include "trellip/special.hpp"

using namespace trellip;

TEST_CASE("philox is deterministic and seed-sensitive") {
  Philox a(42), b(42), c(43);
  for (int i = 0; i < 100; ++i) {
    const std::uint64_t va = a.next_u64();
    CHECK(va == b.next_u64());
  }
  std::set<std::uint64_t> distinct;
  Philox a2(42);
  for (int i = 0; i < 100; ++i) {
    distinct.insert(a2.next_u64());
    distinct.insert(c.next_u64());
  }
  CHECK(distinct.size() == 200);  // no collisions between nearby seeds
}

TEST_CASE("philox uniforms live strictly inside (0,1) and look uniform") {
  Philox rng(7);
  double mean = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    mean += u;
  }
  mean /= n;
  CHECK(std::fabs(mean - 0.5) < 0.002);
}

TEST_CASE("derive_seed separates streams") {
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
}

TEST_CASE("gamma_p against the erf identity P(1/2, x) = erf(sqrt(x))") {
  for (double x : {0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0}) {
    CHECK(gamma_p(0.5, x) ==
          doctest::Approx(std::erf(std::sqrt(x))).epsilon(1e-12));
  }
}

TEST_CASE("gamma_p for integer a matches the exponential sum") {
  // P(3, x) = 1 - e^{-x}(1 + x + x^2/2)
  for (double x : {0.3, 1.0, 4.0, 9.0}) {
    const double expect = 1.0 - std::exp(-x) * (1.0 + x + 0.5 * x * x);
    CHECK(gamma_p(3.0, x) == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("log_gamma_p stays finite where gamma_p underflows") {
  const double lp = log_gamma_p(10.0, 1e-30);
  CHECK(std::isfinite(lp));
  CHECK(lp == doctest::Approx(10.0 * std::log(1e-30) - std::lgamma(11.0))
                  .epsilon(1e-10));
}

TEST_CASE("adaptive Gauss-Kronrod on known integrals") {
  CHECK(adaptive_gauss_kronrod([](double x) { return std::sin(x); }, 0.0,
                               M_PI) == doctest::Approx(2.0).epsilon(1e-12));
  // concentrated integrand needing refinement
  const double v = adaptive_gauss_kronrod(
      [](double x) { return std::exp(-500.0 * x); }, 0.0, 1.0);
  CHECK(v == doctest::Approx((1.0 - std::exp(-500.0)) / 500.0).epsilon(1e-10));
}

TEST_CASE("brent finds the cosine root") {
  const double r = brent([](double x) { return std::cos(x); }, 0.0, 3.0);
  CHECK(r == doctest::Approx(M_PI_2).epsilon(1e-10));
}

TEST_CASE("newton_bisect converges and survives bad Newton steps") {
  // nearly flat far from the root: pure Newton from x0 = 40 would overshoot
  auto f = [](double x) { return std::tanh(x - 3.0); };
  auto df = [](double x) {
    const double t = std::tanh(x - 3.0);
    return 1.0 - t * t;
  };
  const double r = newton_bisect(f, df, 40.0, 0.0, 50.0);
  CHECK(r == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("nelder_mead minimizes a shifted quadratic") {
  auto f = [](const Eigen::VectorXd& v) {
    return 3.0 * (v[0] - 1.5) * (v[0] - 1.5) +
           0.5 * (v[1] + 2.0) * (v[1] + 2.0) + 0.2 * v[0] * v[1];
  };
  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(2);
  const Eigen::VectorXd x = nelder_mead(f, x0, 0.5, 1e-12, 2000);
  Eigen::VectorXd g(2);  // gradient at the reported optimum should vanish
  g[0] = 6.0 * (x[0] - 1.5) + 0.2 * x[1];
  g[1] = (x[1] + 2.0) + 0.2 * x[0];
  CHECK(g.norm() < 1e-4);
}

TEST_CASE("norm_quantile inverts norm_cdf to machine precision") {
  for (double p : {1e-12, 1e-6, 0.01, 0.3, 0.5, 0.7, 0.99, 1.0 - 1e-9}) {
    const double x = norm_quantile(p);
    CHECK(norm_cdf(x) == doctest::Approx(p).epsilon(1e-12));
  }
  CHECK(norm_quantile(0.5) == doctest::Approx(0.0));
  CHECK_THROWS_AS(norm_quantile(0.0), InvalidParameterError);
  CHECK_THROWS_AS(norm_quantile(1.0), InvalidParameterError);
}

TEST_CASE("mvn_logpdf matches the univariate normal density") {
  Eigen::VectorXd x(1), mu(1);
  Eigen::MatrixXd s(1, 1);
  x << 0.7;
  mu << 0.2;
  s << 2.25;
  const double expect = std::log(testutil::phi(0.5 / 1.5) / 1.5);
  CHECK(mvn_logpdf(x, mu, s) == doctest::Approx(expect).epsilon(1e-12));
}

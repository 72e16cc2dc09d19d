// Acceptance suite: runs every contract-level criterion end to end and
// prints one [PASS]/[FAIL]/[SKIP] line per criterion. Exit code is the
// number of failures.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <future>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "scl_sim.hpp"
#include "test_util.hpp"
#include "trellip/io.hpp"
#include "trellip/moments.hpp"
#include "trellip/rng.hpp"
#include "trellip/sampler.hpp"
#include "trellip/scl.hpp"

using namespace trellip;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Outcome {
  bool pass = false;
  bool skipped = false;
  std::string detail;
};

double elapsed_s(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

TruncEllipticalSpec univariate(Family fam, double lo, double hi) {
  Eigen::VectorXd mu(1), a(1), b(1);
  mu << 0;
  a << lo;
  b << hi;
  return {mu, Eigen::MatrixXd::Identity(1, 1), a, b, std::move(fam)};
}

// 1. Half-normal oracle: mean sqrt(2/pi), variance 1 - 2/pi, +-0.01, < 5 s.
Outcome criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  MomentOptions opt;
  opt.n = 100000;
  opt.thinning = 3;
  opt.seed = 101;
  const MomentEstimate est =
      mc_moments_full(univariate(Family::normal(1), 0.0, kInf), opt);
  const double mean_err = std::fabs(est.mean[0] - 0.7978845608);
  const double var_err = std::fabs(est.cov(0, 0) - 0.3633802276);
  const double secs = elapsed_s(t0);
  std::ostringstream os;
  os << "mean err " << mean_err << ", var err " << var_err << ", " << secs
     << " s";
  return {mean_err <= 0.01 && var_err <= 0.01 && secs < 5.0, false, os.str()};
}

// 2. KS vs the analytic TN(0,1;[-1,2]) CDF at alpha=0.01, >= 4/5 seeds,
// < 10 s. Draws are decorrelated by thinning so the iid KS theory applies.
Outcome criterion2() {
  const auto t0 = std::chrono::steady_clock::now();
  const TruncEllipticalSpec spec = univariate(Family::normal(1), -1.0, 2.0);
  int passed = 0;
  for (std::uint64_t seed : {11, 22, 33, 44, 55}) {
    const Chain chain = slice_gibbs_sample(spec, 100000, 100, 10, seed);
    std::vector<double> xs(chain.samples.col(0).data(),
                           chain.samples.col(0).data() + chain.n());
    const double d = testutil::ks_statistic(xs, [](double x) {
      return testutil::truncated_normal_cdf(x, -1.0, 2.0);
    });
    passed += d < testutil::ks_critical_01(xs.size());
  }
  const double secs = elapsed_s(t0);
  std::ostringstream os;
  os << passed << "/5 seeds passed, " << secs << " s";
  return {passed >= 4 && secs < 10.0, false, os.str()};
}

// 3. Untruncated covariance constants c*Sigma within 3 MC s.e. per entry:
// c = 1 (normal), 5/3 (t nu=5), nu/(2m-p-2)=1 (pvii m=4 nu=3), 2 (slash
// nu=2), nu/rho + 1 - nu = 3.8 (cn 0.7, 0.2).
Outcome criterion3() {
  Eigen::VectorXd mu(3);
  mu << 0.5, -1.0, 2.0;
  Eigen::MatrixXd sigma(3, 3);
  sigma << 2.0, 0.5, 0.3,
           0.5, 1.5, 0.4,
           0.3, 0.4, 1.8;
  Eigen::VectorXd inf = Eigen::VectorXd::Constant(3, kInf);

  struct Case {
    Family fam;
    double c;
    const char* name;
  };
  const std::vector<Case> cases{
      {Family::normal(3), 1.0, "normal"},
      {Family::student_t(5, 3), 5.0 / 3.0, "t"},
      {Family::pearson_vii(4.0, 3.0, 3), 3.0 / (8.0 - 3.0 - 2.0), "pvii"},
      {Family::slash(2.0, 3), 2.0, "slash"},
      {Family::contaminated_normal(0.7, 0.2, 3), 0.7 / 0.2 + 0.3, "cn"}};

  std::ostringstream os;
  bool ok = true;
  for (const auto& cs : cases) {
    TruncEllipticalSpec spec{mu, sigma, -inf, inf, cs.fam};
    // burn-in long enough to forget the mode start before estimating
    const Chain chain = slice_gibbs_sample(spec, 100000, 500, 3, 303);
    const Eigen::VectorXd m = chain.samples.colwise().mean();
    const Eigen::MatrixXd cov =
        chain.samples.transpose() * chain.samples / chain.n() -
        m * m.transpose();
    int bad = 0;
    double worst = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j) {
        const double se = testutil::batch_se_cov(chain.samples, i, j);
        const double z = std::fabs(cov(i, j) - cs.c * sigma(i, j)) /
                         (3.0 * se + 1e-12);
        worst = std::max(worst, z);
        bad += z > 1.0;
      }
    ok = ok && bad == 0;
    os << cs.name << " worst |err|/3se " << std::setprecision(3) << worst
       << "; ";
  }
  return {ok, false, os.str()};
}

// 4. Partitioned vs full route on the p=4 Student-t shape (coordinate 2
// free, others doubly truncated), 20 seeds, 3 combined s.e., < 2 min.
Outcome criterion4() {
  const auto t0 = std::chrono::steady_clock::now();
  Eigen::VectorXd mu(4), lo(4), hi(4);
  mu << 0.1, -0.3, 0.2, 0.0;
  lo << -0.8, -kInf, -1.0, -0.7;
  hi << 0.9, kInf, 1.1, 0.8;
  Eigen::MatrixXd sigma(4, 4);
  sigma << 2.0, 0.5, 0.3, 0.2,
           0.5, 1.5, 0.4, 0.1,
           0.3, 0.4, 1.8, 0.6,
           0.2, 0.1, 0.6, 1.2;
  TruncEllipticalSpec spec{mu, sigma, lo, hi, Family::student_t(3, 4)};

  const int n_seeds = 20;
  std::vector<MomentEstimate> part(n_seeds), full(n_seeds);
  std::vector<std::future<void>> futs;
  for (int s = 0; s < n_seeds; ++s) {
    futs.push_back(std::async(std::launch::async, [&, s] {
      MomentOptions opt;
      opt.n = 100000;
      opt.thinning = 3;
      opt.burn_in = 500;  // both routes forget their start transients
      opt.seed = 1000 + s;
      part[s] = mc_moments_partitioned(spec, opt);
      opt.seed = 5000 + s;
      full[s] = mc_moments_full(spec, opt);
    }));
  }
  for (auto& f : futs) f.get();

  auto mean_and_se = [&](const std::vector<MomentEstimate>& v, auto getter) {
    double m = 0.0, s2 = 0.0;
    for (const auto& e : v) m += getter(e);
    m /= v.size();
    for (const auto& e : v) s2 += (getter(e) - m) * (getter(e) - m);
    return std::pair<double, double>(
        m, std::sqrt(s2 / (v.size() - 1) / v.size()));
  };

  double worst = 0.0;
  for (int i = 0; i < 4; ++i) {
    const auto [mp, sp] =
        mean_and_se(part, [&](const MomentEstimate& e) { return e.mean[i]; });
    const auto [mf, sf] =
        mean_and_se(full, [&](const MomentEstimate& e) { return e.mean[i]; });
    worst = std::max(
        worst, std::fabs(mp - mf) / (3.0 * std::hypot(sp, sf) + 1e-12));
    for (int j = i; j < 4; ++j) {
      const auto [cp, csp] = mean_and_se(
          part, [&](const MomentEstimate& e) { return e.cov(i, j); });
      const auto [cf, csf] = mean_and_se(
          full, [&](const MomentEstimate& e) { return e.cov(i, j); });
      worst = std::max(
          worst, std::fabs(cp - cf) / (3.0 * std::hypot(csp, csf) + 1e-12));
    }
  }
  const double secs = elapsed_s(t0);
  std::ostringstream os;
  os << "worst |diff|/3se " << std::setprecision(3) << worst << ", " << secs
     << " s";
  return {worst <= 1.0 && secs < 120.0, false, os.str()};
}

// 5. Pearson VII existence scenarios a/b/c.
Outcome criterion5() {
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(2);
  Eigen::MatrixXd s(2, 2);
  s << 1.0, 0.2, 0.2, 1.0;
  Eigen::VectorXd a(2), b_unbounded(2), b_mixed(2);
  a << -0.8, -0.6;
  b_unbounded << kInf, kInf;
  b_mixed << 0.8, kInf;

  auto rec = [&](double m, const Eigen::VectorXd& b) {
    const Family fam = Family::pearson_vii(m, 1.0, 2);
    return existence_check(fam, split({mu, s, a, b, fam}));
  };
  const auto ra = rec(2.0, b_unbounded);  // only the first moment exists
  const auto rb = rec(1.4, b_mixed);      // all but sigma_22 converge
  const auto rc = rec(2.0, b_mixed);      // everything converges
  const bool ok = ra.mean_exists && !ra.cov_exists && rb.mean_exists &&
                  !rb.cov_exists && rc.mean_exists && rc.cov_exists;
  std::ostringstream os;
  os << "a:(mean " << ra.mean_exists << ", cov " << ra.cov_exists << ") b:("
     << rb.mean_exists << ", " << rb.cov_exists << ") c:(" << rc.mean_exists
     << ", " << rc.cov_exists << ")";
  return {ok, false, os.str()};
}

// 6. Thinning lowers the mean lag-1 ACF in >= 18/20 seeded runs.
Outcome criterion6() {
  Eigen::VectorXd mu(2), lo(2), hi(2);
  mu << 0, 0;
  lo << -2, -2;
  hi << 3, 2;
  Eigen::MatrixXd s(2, 2);
  s << 1, 0.7, 0.7, 1;
  TruncEllipticalSpec spec{mu, s, lo, hi, Family::normal(2)};
  int wins = 0;
  for (int r = 0; r < 20; ++r) {
    const Chain t1 = slice_gibbs_sample(spec, 3000, 0, 1, 600 + r);
    const Chain t3 = slice_gibbs_sample(spec, 3000, 0, 3, 900 + r);
    const double a1 = acf(t1, 1).row(0).mean();
    const double a3 = acf(t3, 1).row(0).mean();
    wins += a3 < a1;
  }
  std::ostringstream os;
  os << wins << "/20 runs improved";
  return {wins >= 18, false, os.str()};
}

// 7. SCL recovery: 20 replicates, n=100, 30% censored, MCEM n_mc=1000 with
// 200 iterations; each parameter within 3 empirical s.e., < 10 min total.
Outcome criterion7() {
  const auto t0 = std::chrono::steady_clock::now();
  const testutil::SclTruth truth;
  const int reps = 20;
  std::vector<Eigen::Vector4d> est(reps);
  std::vector<std::future<void>> futs;
  for (int r = 0; r < reps; ++r) {
    futs.push_back(std::async(std::launch::async, [&, r] {
      const SclDataset data =
          testutil::simulate_scl(100, truth, 0.30, 7000 + r);
      SclParams init;
      init.beta = Eigen::VectorXd::Constant(1, 1.0);
      init.sigma2 = 1.0;
      init.phi = 2.0;
      init.tau2 = 0.2;
      SclFitOptions opt;
      opt.iters = 200;
      opt.n_mc_start = opt.n_mc_end = 1000;
      opt.burn_in = 100;
      opt.thinning = 3;
      opt.seed = 40 + r;
      opt.loglik_n_mc = 100;  // recovery, not likelihood, is scored here
      const SclFit fit = fit_mcem(data, init, opt);
      est[r] << fit.params.beta[0], fit.params.sigma2, fit.params.phi,
          fit.params.tau2;
    }));
  }
  for (auto& f : futs) f.get();

  const Eigen::Vector4d target(truth.beta0, truth.sigma2, truth.phi,
                               truth.tau2);
  Eigen::Vector4d mean = Eigen::Vector4d::Zero();
  for (const auto& e : est) mean += e;
  mean /= reps;
  Eigen::Vector4d sd = Eigen::Vector4d::Zero();
  for (const auto& e : est) sd += (e - mean).cwiseAbs2();
  sd = (sd / (reps - 1)).cwiseSqrt();

  bool ok = true;
  std::ostringstream os;
  const char* names[4] = {"beta0", "sigma2", "phi", "tau2"};
  for (int k = 0; k < 4; ++k) {
    const double se = sd[k] / std::sqrt(static_cast<double>(reps));
    const double z = std::fabs(mean[k] - target[k]) / (3.0 * se + 1e-12);
    ok = ok && z <= 1.0;
    os << names[k] << " " << std::setprecision(3) << mean[k] << " (|err|/3se "
       << z << "); ";
  }
  const double secs = elapsed_s(t0);
  os << secs << " s";
  return {ok && secs < 600.0, false, os.str()};
}

// 8. Missouri reproduction; runs only when the dataset CSV is supplied.
Outcome criterion8() {
  const char* env = std::getenv("MISSOURI_CSV");
  const std::string path = env ? env : "data/missouri.csv";
  if (!std::ifstream(path).good())
    return {false, true,
            "dataset not supplied (set MISSOURI_CSV or provide "
            "data/missouri.csv)"};
  const SclDataset data = read_scl_csv(path);
  SclParams init;
  init.beta = Eigen::VectorXd::Constant(1, 0.0);
  init.sigma2 = 1.0;
  init.phi = 10.0;
  init.tau2 = 0.1;
  SclFitOptions opt;
  opt.iters = 500;
  opt.n_mc_start = opt.n_mc_end = 5000;
  opt.burn_in = 250;
  opt.thinning = 3;
  opt.seed = 1;
  opt.loglik_n_mc = 10000;
  const SclFit fit = fit_mcem(data, init, opt);
  const bool ok = std::fabs(fit.params.beta[0] + 2.41) <= 0.05 &&
                  std::fabs(fit.params.sigma2 - 6.85) <= 0.35 &&
                  std::fabs(fit.params.phi - 15.08) <= 0.75 &&
                  std::fabs(fit.params.tau2 - 0.206) <= 0.02 &&
                  std::fabs(fit.loglik + 143.1) <= 0.5;
  std::ostringstream os;
  os << "beta0 " << fit.params.beta[0] << ", sigma2 " << fit.params.sigma2
     << ", phi " << fit.params.phi << ", tau2 " << fit.params.tau2
     << ", loglik " << fit.loglik;
  return {ok, false, os.str()};
}

// 9. dgf round-trip |g(g^{-1}(y)) - y| <= 1e-8, 100 draws per family.
Outcome criterion9() {
  const std::vector<Family> families{
      Family::normal(2),
      Family::student_t(3.0, 2),
      Family::power_exponential(2.0, 2),
      Family::pearson_vii(2.5, 3.0, 2),
      Family::slash(1.5, 2),
      Family::contaminated_normal(0.7, 0.2, 2),
      Family::kotz(2.0, 0.25, 0.5, 2)};
  double worst = 0.0;
  for (const Family& f : families) {
    Philox rng(909);
    for (int i = 0; i < 100; ++i) {
      double y;
      if (f.kind() == FamilyKind::kKotz) {
        y = dgf_eval(f, std::pow(10.0, rng.uniform(-6.0, 2.0)));
      } else {
        y = dgf_eval(f, 0.0) * std::pow(10.0, -6.0 * rng.uniform());
      }
      worst = std::max(worst, std::fabs(dgf_eval(f, dgf_inverse(f, y)) - y));
    }
  }
  std::ostringstream os;
  os << "worst residual " << worst;
  return {worst <= 1e-8, false, os.str()};
}

// 10. Kotz sampler: 1e4 in-bounds samples on the bivariate example, < 10 s.
Outcome criterion10() {
  const auto t0 = std::chrono::steady_clock::now();
  Eigen::VectorXd mu(2), lo(2), hi(2);
  mu << 0, 0;
  lo << -2, -2;
  hi << 3, 2;
  Eigen::MatrixXd s(2, 2);
  s << 1, 0.7, 0.7, 1;
  TruncEllipticalSpec spec{mu, s, lo, hi, Family::kotz(2.0, 0.25, 0.5, 2)};
  const Chain chain = slice_gibbs_sample(spec, 10000, 0, 1, 1010);
  long violations = 0;
  for (long i = 0; i < chain.n(); ++i)
    for (int j = 0; j < 2; ++j)
      violations += !(chain.samples(i, j) > spec.lower[j] &&
                      chain.samples(i, j) < spec.upper[j]);
  const double secs = elapsed_s(t0);
  std::ostringstream os;
  os << chain.n() << " samples, " << violations << " out of bounds, " << secs
     << " s";
  return {chain.n() == 10000 && violations == 0 && secs < 10.0, false,
          os.str()};
}

}  // namespace

int main() {
  struct Entry {
    int id;
    const char* label;
    Outcome (*run)();
  };
  const std::vector<Entry> entries{
      {1, "half-normal moments oracle", criterion1},
      {2, "KS test against the analytic truncated-normal CDF", criterion2},
      {3, "untruncated covariance constants per family", criterion3},
      {4, "partitioned vs full moment route equivalence", criterion4},
      {5, "Pearson VII moment-existence scenarios", criterion5},
      {6, "thinning reduces lag-1 autocorrelation", criterion6},
      {7, "SCL parameter recovery on simulated data", criterion7},
      {8, "Missouri dataset reproduction (conditional)", criterion8},
      {9, "dgf inverse round-trip accuracy", criterion9},
      {10, "Kotz-type sampler containment", criterion10},
  };

  int failures = 0;
  for (const auto& e : entries) {
    Outcome out;
    try {
      out = e.run();
    } catch (const std::exception& ex) {
      out.pass = false;
      out.detail = std::string("exception: ") + ex.what();
    }
    const char* tag = out.skipped ? "[SKIP]" : (out.pass ? "[PASS]" : "[FAIL]");
    if (!out.skipped && !out.pass) ++failures;
    std::cout << tag << " criterion " << e.id << ": " << e.label << " -- "
              << out.detail << std::endl;
  }
  return failures;
}

// trellip: sampling and moment estimation for truncated multivariate
// elliptical distributions, plus an MCEM fitter for the censored Gaussian
// spatial linear model.

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <iostream>
#include <json.hpp>
#include <random>
#include <string>
#include <vector>

#include "trellip/io.hpp"
#include "trellip/moments.hpp"
#include "trellip/rng.hpp"
#include "trellip/sampler.hpp"
#include "trellip/scl.hpp"

using nlohmann::json;
using namespace trellip;

namespace {

// Every run is reproducible: the seed defaults to this constant rather than
// the clock; pass --seed random for a nondeterministic run.
constexpr std::uint64_t kDefaultSeed = 20101;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::uint64_t parse_seed(const std::string& text) {
  if (text == "random") return std::random_device{}();
  try {
    return std::stoull(text);
  } catch (const std::exception&) {
    throw UsageError("--seed expects an integer or 'random'");
  }
}

Eigen::VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(),
                                           static_cast<long>(v.size()));
}

Family make_family(const std::string& dist, const std::string& nu_text,
                   int p) {
  std::vector<double> nu;
  if (!nu_text.empty()) nu = parse_number_list(nu_text);
  auto need = [&](std::size_t k, const char* what) {
    if (nu.size() != k)
      throw UsageError(std::string("--nu must give ") + what + " for --dist " +
                       dist);
  };
  if (dist == "normal") {
    if (!nu.empty()) throw UsageError("--nu is not accepted for --dist normal");
    return Family::normal(p);
  }
  if (dist == "t") {
    need(1, "one value (degrees of freedom)");
    return Family::student_t(nu[0], p);
  }
  if (dist == "pe") {
    need(1, "one value (kurtosis beta)");
    return Family::power_exponential(nu[0], p);
  }
  if (dist == "pvii") {
    need(2, "two values (m,nu)");
    return Family::pearson_vii(nu[0], nu[1], p);
  }
  if (dist == "slash") {
    need(1, "one value (degrees of freedom)");
    return Family::slash(nu[0], p);
  }
  if (dist == "cn") {
    need(2, "two values (nu,rho)");
    return Family::contaminated_normal(nu[0], nu[1], p);
  }
  if (dist == "kotz") {
    need(3, "three values (r,s,N)");
    return Family::kotz(nu[0], nu[1], nu[2], p);
  }
  throw UsageError("--dist must be one of normal,t,pe,pvii,slash,cn,kotz");
}

TruncEllipticalSpec make_spec(const std::string& dist,
                              const std::string& nu_text,
                              const std::string& mu_text,
                              const std::string& sigma_text,
                              const std::string& lower_text,
                              const std::string& upper_text) {
  const std::vector<double> lower = parse_number_list(lower_text);
  const int p = static_cast<int>(lower.size());
  if (p < 1) throw UsageError("--lower must list at least one bound");

  std::vector<double> upper =
      upper_text.empty()
          ? std::vector<double>(p, std::numeric_limits<double>::infinity())
          : parse_number_list(upper_text);
  if (static_cast<int>(upper.size()) != p)
    throw UsageError("--upper length must match --lower");

  std::vector<double> mu =
      mu_text.empty() ? std::vector<double>(p, 0.0) : parse_number_list(mu_text);
  if (static_cast<int>(mu.size()) != p)
    throw UsageError("--mu length must match --lower");

  Eigen::MatrixXd sigma;
  if (sigma_text.empty()) {
    sigma = Eigen::MatrixXd::Identity(p, p);
  } else {
    const std::vector<double> s = parse_number_list(sigma_text);
    if (static_cast<int>(s.size()) != p * p)
      throw UsageError("--sigma must list p*p values, row-major");
    sigma = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic,
                                           Eigen::Dynamic, Eigen::RowMajor>>(
        s.data(), p, p);
    for (int i = 0; i < p; ++i)
      for (int j = i + 1; j < p; ++j)
        if (std::fabs(sigma(i, j) - sigma(j, i)) >
            1e-12 * std::max(1.0, std::fabs(sigma(i, j))))
          throw UsageError("--sigma is not symmetric");
    sigma = 0.5 * (sigma + sigma.transpose().eval());
  }

  return TruncEllipticalSpec{to_vector(mu), sigma, to_vector(lower),
                             to_vector(upper),
                             make_family(dist, nu_text, p)};
}

json to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (long i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (long i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (long j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
    rows.push_back(r);
  }
  return rows;
}

std::vector<std::string> coord_header(int p, const std::string& stem) {
  std::vector<std::string> h;
  for (int j = 1; j <= p; ++j) h.push_back(stem + std::to_string(j));
  return h;
}

int run_sample(const TruncEllipticalSpec& spec, long n, int burn_in,
               int thinning, std::uint64_t seed, int chains,
               const std::string& out, int precision) {
  std::vector<long> counts(chains, n / chains);
  for (long r = 0; r < n % chains; ++r) ++counts[r];
  std::vector<std::future<Chain>> futs;
  for (int c = 0; c < chains; ++c) {
    const std::uint64_t chain_seed =
        chains == 1 ? seed : derive_seed(seed, static_cast<std::uint64_t>(c));
    futs.push_back(std::async(std::launch::async, [&, c, chain_seed] {
      return slice_gibbs_sample(spec, counts[c], burn_in, thinning,
                                chain_seed);
    }));
  }
  Eigen::MatrixXd all(n, spec.dim());
  long row = 0;
  for (auto& f : futs) {
    const Chain chain = f.get();
    all.middleRows(row, chain.n()) = chain.samples;
    row += chain.n();
  }
  write_csv(out, coord_header(spec.dim(), "x"), all, precision);
  return 0;
}

int run_moments(const TruncEllipticalSpec& spec, const MomentOptions& opt,
                bool full_route, int chains, std::uint64_t seed,
                const std::string& out) {
  auto one = [&](int c) {
    MomentOptions o = opt;
    o.n = opt.n / chains + (c < opt.n % chains ? 1 : 0);
    o.seed = chains == 1 ? seed : derive_seed(seed, static_cast<std::uint64_t>(c));
    return full_route ? mc_moments_full(spec, o)
                      : mc_moments_partitioned(spec, o);
  };
  std::vector<std::future<MomentEstimate>> futs;
  for (int c = 0; c < chains; ++c)
    futs.push_back(std::async(std::launch::async, one, c));
  std::vector<MomentEstimate> parts;
  for (auto& f : futs) parts.push_back(f.get());

  MomentEstimate est = parts.front();
  if (chains > 1) {
    // pool: average first and second moments, rebuild the covariance
    const int p = spec.dim();
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(p);
    Eigen::MatrixXd m2 = Eigen::MatrixXd::Zero(p, p);
    double omega = 0.0, wsum = 0.0;
    long n_used = 0;
    for (const auto& e : parts) {
      const double w = std::max<long>(e.n_used, 1);
      mean += w * e.mean;
      m2 += w * e.second_moment;
      omega += w * e.omega21;
      wsum += w;
      n_used += e.n_used;
    }
    est.mean = mean / wsum;
    est.second_moment = m2 / wsum;
    est.cov = est.second_moment - est.mean * est.mean.transpose();
    est.omega21 = omega / wsum;
    est.n_used = n_used;
  }

  json doc{{"mean", to_json(est.mean)},
           {"EXXt", to_json(est.second_moment)},
           {"cov", to_json(est.cov)},
           {"omega21", est.omega21},
           {"existence",
            {{"mean_exists", est.existence.mean_exists},
             {"cov_exists", est.existence.cov_exists},
             {"reason", est.existence.reason}}},
           {"n_used", est.n_used},
           {"seed", seed}};
  if (!est.warning.empty()) doc["warning"] = est.warning;
  std::ofstream os(out);
  if (!os) throw IoError("cannot open for writing: " + out);
  os << doc.dump(2) << '\n';
  return 0;
}

int run_acf(const std::string& in, int max_lag, const std::string& out,
            int precision) {
  const CsvTable table = read_csv(in);
  const Eigen::MatrixXd r = acf(table.values, max_lag);
  Eigen::MatrixXd with_lag(r.rows(), r.cols() + 1);
  for (long k = 0; k < r.rows(); ++k) with_lag(k, 0) = static_cast<double>(k + 1);
  with_lag.rightCols(r.cols()) = r;
  std::vector<std::string> header{"lag"};
  for (const auto& name : table.header) header.push_back("acf_" + name);
  write_csv(out, header, with_lag, precision);
  return 0;
}

SclParams default_init(const SclDataset& data) {
  // pseudo-response: observed values, censored replaced by the nearest
  // finite censoring endpoint (or midpoint when both are finite)
  Eigen::VectorXd z(data.n());
  for (int i = 0; i < data.n(); ++i) {
    if (!data.cens[i]) {
      z[i] = data.observed[i];
    } else if (std::isfinite(data.v_lower[i]) && std::isfinite(data.v_upper[i])) {
      z[i] = 0.5 * (data.v_lower[i] + data.v_upper[i]);
    } else if (std::isfinite(data.v_upper[i])) {
      z[i] = data.v_upper[i];
    } else if (std::isfinite(data.v_lower[i])) {
      z[i] = data.v_lower[i];
    } else {
      z[i] = 0.0;
    }
  }
  SclParams init;
  const Eigen::MatrixXd& x = data.design;
  init.beta = (x.transpose() * x).ldlt().solve(x.transpose() * z);
  const Eigen::VectorXd resid = z - x * init.beta;
  const double var = resid.squaredNorm() / std::max(1, data.n() - data.q());
  init.sigma2 = std::max(var, 1e-6);
  init.tau2 = 0.1 * init.sigma2;
  // median pairwise distance / 2 as the starting range
  std::vector<double> dists;
  for (int i = 0; i < data.n(); ++i)
    for (int k = i + 1; k < data.n(); ++k)
      dists.push_back((data.coords.row(i) - data.coords.row(k)).norm());
  std::nth_element(dists.begin(), dists.begin() + dists.size() / 2,
                   dists.end());
  init.phi = std::max(dists[dists.size() / 2] / 2.0, 1e-3);
  return init;
}

int run_fit_scl(const std::string& data_path, const std::string& corr,
                const SclFitOptions& opt, const std::string& init_text,
                const std::string& out, const std::string& trace_path) {
  if (corr != "exp")
    throw UsageError("--corr supports only 'exp' (exponential correlation)");
  const SclDataset data = read_scl_csv(data_path);
  SclParams init;
  if (init_text.empty()) {
    init = default_init(data);
  } else {
    const std::vector<double> v = parse_number_list(init_text);
    if (static_cast<int>(v.size()) != data.q() + 3)
      throw UsageError("--init expects q+3 values: beta...,sigma2,phi,tau2");
    init.beta = to_vector(v).head(data.q());
    init.sigma2 = v[data.q()];
    init.phi = v[data.q() + 1];
    init.tau2 = v[data.q() + 2];
  }

  const auto t0 = std::chrono::steady_clock::now();
  const SclFit fit = fit_mcem(data, init, opt);
  const double runtime =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  json doc{{"params",
            {{"beta", to_json(fit.params.beta)},
             {"sigma2", fit.params.sigma2},
             {"phi", fit.params.phi},
             {"tau2", fit.params.tau2}}},
           {"loglik", fit.loglik},
           {"AIC", fit.aic},
           {"BIC", fit.bic},
           {"n", data.n()},
           {"n_censored", data.n_censored()},
           {"iters", opt.iters},
           {"seed", opt.seed},
           {"runtime_seconds", runtime}};
  std::ofstream os(out);
  if (!os) throw IoError("cannot open for writing: " + out);
  os << doc.dump(2) << '\n';

  if (!trace_path.empty()) {
    std::vector<std::string> header{"iter"};
    for (int j = 0; j < data.q(); ++j)
      header.push_back("beta" + std::to_string(j));
    header.insert(header.end(), {"sigma2", "phi", "tau2"});
    Eigen::MatrixXd with_iter(fit.trace.rows(), fit.trace.cols() + 1);
    for (long k = 0; k < fit.trace.rows(); ++k)
      with_iter(k, 0) = static_cast<double>(k + 1);
    with_iter.rightCols(fit.trace.cols()) = fit.trace;
    write_csv(trace_path, header, with_iter, 17);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sampling and truncated moments for multivariate elliptical "
               "distributions"};
  app.require_subcommand(1);

  std::string dist = "normal", nu_text, mu_text, sigma_text, lower_text,
              upper_text;
  std::string seed_text = std::to_string(kDefaultSeed);
  std::string out = "out.csv", in_path, format = "full";
  long n = 10000;
  int burn_in = 0, thinning = 1, mom_thinning = 3, chains = 1, max_lag = 50;

  auto add_spec_flags = [&](CLI::App* cmd) {
    cmd->add_option("--dist", dist,
                    "family: normal,t,pe,pvii,slash,cn,kotz");
    cmd->add_option("--nu", nu_text,
                    "family parameters: scalar for t/pe/slash, m,nu for "
                    "pvii, nu,rho for cn, r,s,N for kotz");
    cmd->add_option("--mu", mu_text, "location, comma list (default 0)");
    cmd->add_option("--sigma", sigma_text,
                    "scale matrix, row-major comma list (default identity)");
    cmd->add_option("--lower", lower_text,
                    "lower bounds, comma list; -inf allowed")
        ->required();
    cmd->add_option("--upper", upper_text,
                    "upper bounds, comma list; inf allowed (default inf)");
    cmd->add_option("--seed", seed_text, "RNG seed (integer or 'random')");
    cmd->add_option("--chains", chains, "parallel chains with derived seeds")
        ->check(CLI::PositiveNumber);
  };

  CLI::App* sample = app.add_subcommand("sample", "draw truncated samples");
  add_spec_flags(sample);
  sample->add_option("--n", n, "number of kept samples")
      ->check(CLI::PositiveNumber);
  sample->add_option("--burn-in", burn_in, "iterations discarded up front")
      ->check(CLI::NonNegativeNumber);
  sample->add_option("--thinning", thinning, "keep every k-th state")
      ->check(CLI::PositiveNumber);
  sample->add_option("--out", out, "output CSV path");
  sample->add_option("--format", format, "full (17 digits) or compact (6)")
      ->check(CLI::IsMember({"full", "compact"}));

  CLI::App* acf_cmd =
      app.add_subcommand("acf", "sample autocorrelations of a chain CSV");
  acf_cmd->add_option("--in", in_path, "input CSV of samples")->required();
  acf_cmd->add_option("--max-lag", max_lag, "largest lag")
      ->check(CLI::PositiveNumber);
  acf_cmd->add_option("--out", out, "output CSV path");
  acf_cmd->add_option("--format", format, "full (17 digits) or compact (6)")
      ->check(CLI::IsMember({"full", "compact"}));

  bool allow_divergent = false, full_route = false;
  CLI::App* moments_cmd =
      app.add_subcommand("moments", "estimate mean/covariance by Monte Carlo");
  add_spec_flags(moments_cmd);
  moments_cmd->add_option("--n", n, "Monte Carlo sample size")
      ->check(CLI::PositiveNumber);
  moments_cmd->add_option("--burn-in", burn_in, "burn-in iterations")
      ->check(CLI::NonNegativeNumber);
  moments_cmd->add_option("--thinning", mom_thinning, "keep every k-th state")
      ->check(CLI::PositiveNumber);
  moments_cmd->add_option("--out", out, "output JSON path");
  moments_cmd->add_flag("--allow-divergent", allow_divergent,
                        "compute even when the moments do not exist");
  moments_cmd->add_flag("--full", full_route,
                        "force the full-vector Monte Carlo route");

  std::string data_path, corr = "exp", init_text, trace_path, n_mc_text = "5000";
  SclFitOptions fit_opt;
  CLI::App* fit = app.add_subcommand(
      "fit-scl", "MCEM fit of the censored Gaussian spatial linear model");
  fit->add_option("--data", data_path, "dataset CSV: x,y,v,lower,upper,cens")
      ->required();
  fit->add_option("--corr", corr, "correlation function (exp)");
  fit->add_option("--iters", fit_opt.iters, "EM iterations")
      ->check(CLI::PositiveNumber);
  fit->add_option("--n-mc", n_mc_text,
                  "E-step Monte Carlo size; 'a:b' increases linearly a to b");
  fit->add_option("--burn-in", fit_opt.burn_in,
                  "trace burn-in for the final averaged estimate")
      ->check(CLI::NonNegativeNumber);
  fit->add_option("--thinning", fit_opt.thinning, "trace thinning")
      ->check(CLI::PositiveNumber);
  fit->add_option("--seed", seed_text, "RNG seed (integer or 'random')");
  fit->add_option("--init", init_text,
                  "starting values beta...,sigma2,phi,tau2");
  fit->add_option("--out", out, "output JSON path");
  fit->add_option("--trace", trace_path, "per-iteration parameter CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  }

  try {
    const std::uint64_t seed = parse_seed(seed_text);
    const int precision = format == "compact" ? 6 : 17;
    if (app.got_subcommand(sample)) {
      const TruncEllipticalSpec spec = make_spec(dist, nu_text, mu_text,
                                                 sigma_text, lower_text,
                                                 upper_text);
      return run_sample(spec, n, burn_in, thinning, seed, chains, out,
                        precision);
    }
    if (app.got_subcommand(acf_cmd)) return run_acf(in_path, max_lag, out, precision);
    if (app.got_subcommand(moments_cmd)) {
      const TruncEllipticalSpec spec = make_spec(dist, nu_text, mu_text,
                                                 sigma_text, lower_text,
                                                 upper_text);
      MomentOptions opt;
      opt.n = n;
      opt.burn_in = burn_in;
      opt.thinning = mom_thinning;
      opt.seed = seed;
      opt.allow_divergent = allow_divergent;
      return run_moments(spec, opt, full_route, chains, seed, out);
    }
    if (app.got_subcommand(fit)) {
      fit_opt.seed = seed;
      const std::size_t colon = n_mc_text.find(':');
      if (colon == std::string::npos) {
        fit_opt.n_mc_start = fit_opt.n_mc_end = std::stol(n_mc_text);
      } else {
        fit_opt.n_mc_start = std::stol(n_mc_text.substr(0, colon));
        fit_opt.n_mc_end = std::stol(n_mc_text.substr(colon + 1));
      }
      return run_fit_scl(data_path, corr, fit_opt, init_text, out, trace_path);
    }
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "error[" << e.name() << "]: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error[internal]: " << e.what() << '\n';
    return 1;
  }
}

// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "driftbench/bayes.hpp"
#include "driftbench/stats.hpp"

using namespace driftbench;

namespace {

const WaveletBasis& basis() {
  static WaveletBasis b{};
  return b;
}

const WaveletBasis& fourier() {
  static WaveletBasis b{[] {
    WaveletBasis::Options opts;
    opts.family = WaveletFamily::fourier_trig;
    return opts;
  }()};
  return b;
}

Model pi_cos_model(double sigma = 1.0) {
  DriftSpec drift = DriftSpec::closed_form(
      PeriodicFunction([](double x) { return M_PI * std::cos(2.0 * M_PI * x); }),
      PeriodicFunction([](double x) { return -2.0 * M_PI * M_PI * std::sin(2.0 * M_PI * x); }),
      M_PI + 2.0 * M_PI * M_PI);
  return Model(ModelParams{drift, SigmaSpec::constant(sigma), {}, {}});
}

Observations simulate_obs(const Model& model, std::size_t n, double delta,
                          std::uint64_t seed, int substeps = 50) {
  PathConfig config;
  config.n = n;
  config.Delta = delta;
  config.substeps = substeps;
  config.seed = seed;
  config.high_frequency = false;
  return subsample(simulate_path(model, config), config);
}

}  // namespace

TEST_CASE("sieve prior defaults match the level weight rules") {
  const PriorSpec prior = PriorSpec::sieve_prior(1.0, QKind::uniform, 5);
  CHECK(prior.tau_at(-1) == doctest::Approx(1.0));
  CHECK(prior.tau_at(0) == doctest::Approx(1.0));
  CHECK(prior.tau_at(1) == doctest::Approx(std::pow(2.0, -1.5)));
  CHECK(prior.tau_at(3) == doctest::Approx(std::pow(2.0, -4.5) / 9.0));

  // h(1) = e^{-2} / sum_j e^{-2^j}, by direct series summation.
  double total = 0.0;
  for (int m = 1; m <= 5; ++m) total += std::exp(-std::pow(2.0, m));
  CHECK(prior.level_mass(1) == doctest::Approx(std::exp(-2.0) / total));
  CHECK(prior.level_mass(1) == doctest::Approx(0.879).epsilon(2e-3));

  const PriorSpec ks = PriorSpec::known_smoothness(2.0, 1.0, QKind::uniform, 5);
  CHECK(ks.tau_at(2) == doctest::Approx(std::pow(2.0, -5.0)));
  const PriorSpec inv = PriorSpec::invariant_density_prior(2.0, 1.0, QKind::uniform, 5);
  CHECK(inv.tau_at(2) == doctest::Approx(std::pow(2.0, -7.0) / 4.0));
}

TEST_CASE("prior draws: support and uniform moments") {
  const PriorSpec prior = PriorSpec::sieve_prior(1.0, QKind::uniform, 5);
  CounterRng rng(12);
  RunningStats u_stats;
  for (int rep = 0; rep < 100000; ++rep) u_stats.add(sample_q(prior, rng));
  CHECK(std::abs(u_stats.mean() - prior.B / 2.0) <= 3.0 * u_stats.mean_se());

  for (int rep = 0; rep < 200; ++rep) {
    const CoefficientVector c = sample_prior(prior, 3, rng);
    for (std::size_t s = 0; s < c.size(); ++s) {
      auto [l, k] = CoefficientVector::level_of(s);
      (void)k;
      CHECK(std::abs(c.flat()[s]) / prior.tau_at(l) <= prior.B);
    }
  }
}

TEST_CASE("sieve level draw frequencies match h") {
  const PriorSpec prior = PriorSpec::sieve_prior(1.0, QKind::uniform, 5);
  CounterRng rng(77);
  const int reps = 100000;
  int count1 = 0;
  for (int rep = 0; rep < reps; ++rep)
    if (sample_prior_level(prior, rng) == 1) ++count1;
  const double freq = static_cast<double>(count1) / reps;
  const double p = prior.level_mass(1);
  CHECK(std::abs(freq - p) <= 3.0 * std::sqrt(p * (1 - p) / reps));
}

TEST_CASE("truncated gaussian q respects its support and floor") {
  const PriorSpec prior = PriorSpec::sieve_prior(1.5, QKind::truncated_gaussian, 4);
  CounterRng rng(5);
  for (int rep = 0; rep < 20000; ++rep) {
    const double u = sample_q(prior, rng);
    CHECK(std::abs(u) <= prior.B + 1.0);
  }
  CHECK(std::exp(log_q(prior, prior.B)) >= prior.zeta - 1e-12);
  CHECK(log_q(prior, prior.B + 1.5) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("prior draws stay inside the implied Theta ball") {
  const PriorSpec prior = PriorSpec::sieve_prior(1.0, QKind::uniform, 5);
  const double K0 = implied_theta_bound(prior, basis());
  CHECK(K0 > 0.0);
  CounterRng rng(31);
  const std::size_t grid = 512;
  for (int rep = 0; rep < 2000; ++rep) {
    const int m = sample_prior_level(prior, rng);
    const CoefficientVector c = sample_prior(prior, m, rng);
    std::vector<double> vals(grid + 1);
    for (std::size_t j = 0; j <= grid; ++j)
      vals[j] = synthesize_at(c, basis(), static_cast<double>(j) / grid);
    vals[grid] = vals[0];
    const auto dv = periodic_derivative4(vals);
    double c1 = 0.0, sup = 0.0;
    for (std::size_t j = 0; j < grid; ++j) {
      sup = std::max(sup, std::abs(vals[j]));
      c1 = std::max(c1, std::abs(dv[j]));
    }
    CHECK(sup + c1 <= K0);
  }
}

TEST_CASE("drift from a constant log-density is zero") {
  CoefficientVector Hc(1);
  Hc.at(-1, 0) = 3.0;
  const DriftSpec b = drift_from_logdensity(Hc, SigmaSpec::constant(1.0), basis());
  for (double x : {0.0, 0.2, 0.7}) CHECK(b.f(x) == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("drift from H = sin(2 pi x) under unit sigma") {
  // b = ((sigma^2)' + sigma^2 H')/2 = pi cos(2 pi x)
  PeriodicFunction h([](double x) { return std::sin(2 * M_PI * x); });
  const CoefficientVector H = analyze(h, 2, fourier());
  const DriftSpec b = drift_from_logdensity(H, SigmaSpec::constant(1.0), fourier());
  for (double x : {0.0, 0.1, 0.33, 0.72})
    CHECK(b.f(x) == doctest::Approx(M_PI * std::cos(2 * M_PI * x)).epsilon(1e-5));

  // identifiability: I_b(1) = 0
  const Model model(ModelParams{b, SigmaSpec::constant(1.0), {}, {}});
  CHECK(std::abs(model.integrated_drift(1.0)) < 1e-6);
}

TEST_CASE("log-density round trip: invariant density proportional to e^H") {
  PeriodicFunction h([](double x) { return 0.8 * std::sin(2 * M_PI * x); });
  const CoefficientVector H = analyze(h, 2, fourier());
  const SigmaSpec sigma = SigmaSpec::constant(1.0);
  const DriftSpec b = drift_from_logdensity(H, sigma, fourier());
  const Model model(ModelParams{b, sigma, {}, {}});
  const InvariantDensity& pi = model.stationary();

  // reference: e^{H(x)} / int e^H
  const int nq = 1 << 12;
  double Z = 0.0;
  std::vector<double> ref(nq);
  for (int i = 0; i < nq; ++i) {
    ref[i] = std::exp(synthesize_at(H, fourier(), (i + 0.5) / nq));
    Z += ref[i] / nq;
  }
  double l1 = 0.0;
  for (int i = 0; i < nq; ++i) l1 += std::abs(pi((i + 0.5) / nq) - ref[i] / Z) / nq;
  CHECK(l1 < 1e-4);
}

TEST_CASE("pseudo likelihood: single Brownian transition closed form") {
  const Model zero(ModelParams{DriftSpec::zero(), SigmaSpec::constant(1.0), {}, {}});
  Observations obs;
  obs.delta = 0.01;
  obs.samples = {0.4, 0.45};
  const double z = 0.05;
  const double expect = -0.5 * std::log(2 * M_PI * obs.delta) - z * z / (2 * obs.delta);
  // log pi_b(x0) = log 1 = 0 for the uniform invariant density
  CHECK(log_pseudo_likelihood(zero, obs) == doctest::Approx(expect).epsilon(1e-9));
}

TEST_CASE("pseudo likelihood is invariant to integer shifts of interior samples") {
  const Model model = pi_cos_model();
  Observations obs = simulate_obs(model, 32, 0.01, 3);
  const double base = log_pseudo_likelihood(model, obs);
  Observations shifted = obs;
  shifted.samples[10] += 3.0;  // integer winding change only
  shifted.samples[20] -= 1.0;
  CHECK(log_pseudo_likelihood(model, shifted) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("pseudo likelihood orders the truth above a separated alternative") {
  const Model truth = pi_cos_model();
  DriftSpec alt = DriftSpec::closed_form(
      PeriodicFunction([](double x) { return -M_PI * std::cos(2.0 * M_PI * x); }),
      PeriodicFunction([](double x) { return 2.0 * M_PI * M_PI * std::sin(2.0 * M_PI * x); }),
      M_PI + 2.0 * M_PI * M_PI);
  const Model wrong(ModelParams{alt, SigmaSpec::constant(1.0), {}, {}});
  RunningStats gap;
  for (int rep = 0; rep < 50; ++rep) {
    const Observations obs = simulate_obs(truth, 256, 0.005, 1200 + rep, 20);
    gap.add(log_pseudo_likelihood(truth, obs) - log_pseudo_likelihood(wrong, obs));
  }
  CHECK(gap.mean() > 0.0);
  CHECK(gap.mean() > 3.0 * gap.mean_se());
}

TEST_CASE("girsanov ratio: zero at the truth, antisymmetric in the pair") {
  const Model model = pi_cos_model();
  PathConfig pc;
  pc.n = 16;
  pc.Delta = 0.01;
  pc.seed = 9;
  const SamplePath path = simulate_path(model, pc);

  const DriftSpec& b0 = model.params().drift;
  CHECK(girsanov_loglik_ratio(b0, b0, model.params().sigma, path) == 0.0);

  DriftSpec other = DriftSpec::closed_form(
      PeriodicFunction([](double x) { return std::sin(2 * M_PI * x); }),
      PeriodicFunction([](double x) { return 2 * M_PI * std::cos(2 * M_PI * x); }), 10.0);
  const double ab = girsanov_loglik_ratio(b0, other, model.params().sigma, path);
  const double ba = girsanov_loglik_ratio(other, b0, model.params().sigma, path);
  CHECK(ab == doctest::Approx(-ba).epsilon(1e-12));
}

TEST_CASE("girsanov mean and second moment match the Ito-isometry oracle") {
  const Model model0 = pi_cos_model();
  DriftSpec alt = DriftSpec::closed_form(
      PeriodicFunction([](double x) { return M_PI * std::cos(2 * M_PI * x) + std::sin(2 * M_PI * x); }),
      PeriodicFunction([](double x) {
        return -2 * M_PI * M_PI * std::sin(2 * M_PI * x) + 2 * M_PI * std::cos(2 * M_PI * x);
      }),
      12.0);
  const Model model(ModelParams{alt, SigmaSpec::constant(1.0), {}, {}});
  const KlCheckReport rep = kl_checks(model0, model, 64, 2e-3, 20000, 99, 20);

  CHECK(std::abs(rep.kl_path - rep.kl_quad) <= 3.0 * rep.kl_path_se);
  CHECK(std::abs(rep.second_moment - rep.second_moment_quad) <= 3.0 * rep.second_moment_se);
  // control-variate estimator agrees too, with a much smaller SE
  CHECK(std::abs(rep.kl_path_cv - rep.kl_quad) <= 3.0 * rep.kl_path_cv_se);
  CHECK(rep.kl_path_cv_se < rep.kl_path_se);
}

TEST_CASE("kl_checks at the truth vanish within noise") {
  const Model model0 = pi_cos_model();
  const KlCheckReport rep = kl_checks(model0, model0, 32, 5e-3, 4000, 7, 10);
  CHECK(rep.kl_path == doctest::Approx(0.0));
  CHECK(rep.kl_invariant == doctest::Approx(0.0));
  CHECK(std::abs(rep.kl_joint) <= 3.0 * std::max(rep.kl_joint_se, 1e-300));
  CHECK(rep.var_joint <= 1e-20);
}

TEST_CASE("kl estimates are nonnegative within noise") {
  const Model model0 = pi_cos_model();
  CounterRng rng(55);
  for (int trial = 0; trial < 5; ++trial) {
    const double a = rng.uniform(-0.5, 0.5);
    DriftSpec alt = DriftSpec::from_function(
        PeriodicFunction([a](double x) {
          return M_PI * std::cos(2 * M_PI * x) + a * std::sin(4 * M_PI * x);
        }),
        20.0);
    const Model model(ModelParams{alt, SigmaSpec::constant(1.0), {}, {}});
    const KlCheckReport rep = kl_checks(model0, model, 16, 5e-3, 2000, 100 + trial, 10);
    CHECK(rep.kl_path >= -3.0 * rep.kl_path_se);
    CHECK(rep.kl_step >= -3.0 * rep.kl_step_se);
    CHECK(rep.kl_invariant >= 0.0);
  }
}

TEST_CASE("mh accept: equal target values always accept") {
  CounterRng rng(2);
  for (int trial = 0; trial < 1000; ++trial) CHECK(mh_accept(0.0, rng.uniform()));
  CHECK_FALSE(mh_accept(-1e9, 0.5));
}

TEST_CASE("metropolis kernel has the right stationary law on a 3-state stub") {
  // Random-walk proposal over {0,1,2} (move +-1, clamp at the ends) driven
  // by the same accept rule as the sampler.
  const double target[3] = {0.2, 0.3, 0.5};
  int state = 0;
  std::vector<double> occ(3, 0.0);
  CounterRng rng(123);
  const int steps = 2000000;
  for (int it = 0; it < steps; ++it) {
    int prop = state + (rng.uniform() < 0.5 ? -1 : 1);
    if (prop < 0) prop = 0;
    if (prop > 2) prop = 2;
    const double log_alpha = std::log(target[prop]) - std::log(target[state]);
    if (mh_accept(log_alpha, rng.uniform())) state = prop;
    ++occ[state];
  }
  double l1 = 0.0;
  for (int s = 0; s < 3; ++s) l1 += std::abs(occ[s] / steps - target[s]);
  CHECK(l1 < 0.01);
}

TEST_CASE("flat-likelihood chain recovers the prior") {
  // Known-smoothness prior, no level moves: each u_lk should be Unif[0, B].
  const PriorSpec prior = PriorSpec::known_smoothness(2.0, 1.0, QKind::uniform, 2);
  MCMCConfig config;
  config.iters = 310000;
  config.burnin = 10000;
  config.thin = 3;
  config.seed = 99;
  config.flat_likelihood = true;
  const PosteriorChain chain =
      run_mcmc(prior, Observations{}, config, basis(), SigmaSpec::constant(1.0));
  REQUIRE(chain.draws.size() == 100000);

  std::vector<double> u;
  u.reserve(chain.draws.size());
  for (const Draw& d : chain.draws) u.push_back(d.coeffs(1, 1) / prior.tau_at(1));
  std::sort(u.begin(), u.end());
  double ks = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double f = static_cast<double>(i + 1) / u.size();
    ks = std::max(ks, std::abs(f - u[i] / prior.B));
  }
  CHECK(ks < 0.02);
}

TEST_CASE("flat-likelihood sieve chain matches the level mass h") {
  const PriorSpec prior = PriorSpec::sieve_prior(1.0, QKind::uniform, 4);
  MCMCConfig config;
  config.iters = 60000;
  config.burnin = 10000;
  config.seed = 43;
  config.flat_likelihood = true;
  config.level_move_prob = 0.4;
  const PosteriorChain chain =
      run_mcmc(prior, Observations{}, config, basis(), SigmaSpec::constant(1.0));
  double freq1 = 0.0;
  for (const Draw& d : chain.draws) freq1 += d.m == 1 ? 1.0 : 0.0;
  freq1 /= static_cast<double>(chain.draws.size());
  CHECK(freq1 == doctest::Approx(prior.level_mass(1)).epsilon(0.02));
}

TEST_CASE("posterior ball mass endpoints") {
  const PriorSpec prior = PriorSpec::known_smoothness(2.0, 1.0, QKind::uniform, 2);
  MCMCConfig config;
  config.iters = 2000;
  config.burnin = 500;
  config.seed = 3;
  config.flat_likelihood = true;
  const PosteriorChain chain =
      run_mcmc(prior, Observations{}, config, basis(), SigmaSpec::constant(1.0));
  PeriodicFunction b0([](double x) { return std::sin(2 * M_PI * x); });
  CHECK(posterior_ball_mass(chain, b0, 1e9, basis(), 4) == doctest::Approx(1.0));
  CHECK(posterior_ball_mass(chain, b0, 0.0, basis(), 4) == doctest::Approx(0.0));
}

TEST_CASE("posterior mean error tracks the minimum-contrast fit") {
  // Posterior-mean L2 error below 2x the fitted-estimator error in >= 80%
  // of replications.
  const Model truth = pi_cos_model();
  const PriorSpec prior = PriorSpec::sieve_prior(2.0, QKind::truncated_gaussian, 4);
  const std::size_t n = 1 << 14;
  const double delta = std::pow(static_cast<double>(n), -0.6);

  EstimatorConfig ec;
  RateSchedule schedule;
  schedule.s = 2.0;
  ec.resolution = schedule;
  ec.K0 = truth.params().drift.K0;
  ec.basis = &basis();

  const CoefficientVector c0 = analyze(truth.params().drift.f, 4, basis());
  const double tail = l2_distance(synthesize(c0, basis()), truth.params().drift.f);

  int ok = 0;
  const int reps = 20;
  for (int rep = 0; rep < reps; ++rep) {
    const Observations obs = simulate_obs(truth, n, delta, 40000 + rep, 10);
    const FitResult fit = fit_minimum_contrast(obs, ec);
    const double err_fit =
        std::sqrt(std::pow(coeff_l2_distance(fit.coeffs.padded(4), c0), 2) + tail * tail);

    MCMCConfig mc;
    mc.iters = 16000;
    mc.burnin = 6000;
    mc.thin = 2;
    mc.seed = 50000 + rep;
    const PosteriorChain chain = run_mcmc(prior, obs, mc, basis(), SigmaSpec::constant(1.0));
    const CoefficientVector pm = posterior_mean(chain, 4);
    const double err_post =
        std::sqrt(std::pow(coeff_l2_distance(pm, c0), 2) + tail * tail);
    if (err_post <= 2.0 * err_fit) ++ok;
  }
  CHECK(ok >= 16);
}

TEST_CASE("mcmc aborts with a diagnostic when nothing is accepted") {
  // Poisoned data (NaN sample) makes every likelihood delta NaN, so no
  // proposal can be accepted over the whole burnin.
  const PriorSpec prior = PriorSpec::known_smoothness(2.0, 1.0, QKind::uniform, 2);
  const Model truth = pi_cos_model();
  Observations obs = simulate_obs(truth, 128, 0.01, 8);
  obs.samples[64] = std::numeric_limits<double>::quiet_NaN();
  MCMCConfig config;
  config.iters = 400;
  config.burnin = 200;
  config.seed = 4;
  CHECK_THROWS_AS(
      (void)run_mcmc(prior, obs, config, basis(), SigmaSpec::constant(1.0)),
      std::runtime_error);
}

// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include <cmath>

#include "driftbench/bayes.hpp"
#include "driftbench/estimator.hpp"
#include "driftbench/simulate.hpp"
#include "driftbench/wavelet.hpp"

namespace {

using namespace driftbench;

const WaveletBasis& daub() {
  static WaveletBasis basis{};
  return basis;
}

Model make_model() {
  DriftSpec drift = DriftSpec::closed_form(
      PeriodicFunction([](double x) { return M_PI * std::cos(2 * M_PI * x); }),
      PeriodicFunction([](double x) { return -2 * M_PI * M_PI * std::sin(2 * M_PI * x); }),
      M_PI + 2 * M_PI * M_PI);
  return Model(ModelParams{drift, SigmaSpec::constant(1.0), {}, {}});
}

void BM_WaveletEvaluate(benchmark::State& state) {
  const int level = static_cast<int>(state.range(0));
  double x = 0.123;
  for (auto _ : state) {
    benchmark::DoNotOptimize(daub().evaluate(level, 0, x));
    x = wrap01(x + 0.618033988749895);
  }
}
BENCHMARK(BM_WaveletEvaluate)->Arg(0)->Arg(3)->Arg(6);

void BM_Synthesize(benchmark::State& state) {
  CoefficientVector c(static_cast<int>(state.range(0)));
  for (std::size_t s = 0; s < c.size(); ++s) c.flat()[s] = 0.1 * (s % 7);
  double x = 0.37;
  for (auto _ : state) {
    benchmark::DoNotOptimize(synthesize_at(c, daub(), x));
    x = wrap01(x + 0.618033988749895);
  }
}
BENCHMARK(BM_Synthesize)->Arg(3)->Arg(5);

void BM_SimulatePath(benchmark::State& state) {
  const Model model = make_model();
  PathConfig config;
  config.n = static_cast<std::size_t>(state.range(0));
  config.Delta = 0.01;
  config.substeps = 50;
  config.seed = 7;
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate_path(model, config));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(config.n) * 50);
}
BENCHMARK(BM_SimulatePath)->Arg(1024)->Arg(8192);

void BM_FitMinimumContrast(benchmark::State& state) {
  const Model model = make_model();
  PathConfig pc;
  pc.n = static_cast<std::size_t>(state.range(0));
  pc.Delta = std::pow(static_cast<double>(pc.n), -0.6);
  pc.substeps = 10;
  pc.seed = 5;
  const Observations obs = subsample(simulate_path(model, pc), pc);
  EstimatorConfig config;
  RateSchedule schedule;
  schedule.s = 2.0;
  config.resolution = schedule;
  config.K0 = 13.0;
  config.basis = &daub();
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_minimum_contrast(obs, config));
  }
}
BENCHMARK(BM_FitMinimumContrast)->Arg(4096)->Arg(16384);

void BM_PseudoLikelihood(benchmark::State& state) {
  const Model model = make_model();
  PathConfig pc;
  pc.n = static_cast<std::size_t>(state.range(0));
  pc.Delta = 0.005;
  pc.substeps = 10;
  pc.seed = 5;
  const Observations obs = subsample(simulate_path(model, pc), pc);
  for (auto _ : state) {
    benchmark::DoNotOptimize(log_pseudo_likelihood(model, obs));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(pc.n));
}
BENCHMARK(BM_PseudoLikelihood)->Arg(4096)->Arg(65536);

void BM_InvariantDensity(benchmark::State& state) {
  const Model model = make_model();
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.invariant_density(static_cast<std::size_t>(state.range(0))));
  }
}
BENCHMARK(BM_InvariantDensity)->Arg(256)->Arg(4096);

void BM_HolderModulus(benchmark::State& state) {
  const Model model = make_model();
  PathConfig pc;
  pc.n = 500;
  pc.Delta = 0.01;
  pc.substeps = 10;
  pc.seed = 3;
  pc.high_frequency = false;
  const SamplePath path = simulate_path(model, pc);
  for (auto _ : state) {
    benchmark::DoNotOptimize(holder_modulus_stat(path, 5.0, std::exp(-2.0)));
  }
}
BENCHMARK(BM_HolderModulus);

}  // namespace

BENCHMARK_MAIN();

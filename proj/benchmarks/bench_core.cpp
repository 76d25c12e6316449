#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "ceo/estimators.hpp"
#include "ceo/harness.hpp"
#include "ceo/quadrature.hpp"
#include "ceo/rng.hpp"

using namespace ceo;

static void BM_AdaptiveQuadrature(benchmark::State& state) {
  const auto f = [](double x) { return std::exp(-0.5 * x * x) * std::abs(x); };
  for (auto _ : state) benchmark::DoNotOptimize(numerics::integrate(f, -30.0, 30.0).value);
}
BENCHMARK(BM_AdaptiveQuadrature);

static void BM_PhiloxUniform(benchmark::State& state) {
  numerics::RngStream rng(1, 2);
  for (auto _ : state) benchmark::DoNotOptimize(rng.uniform());
}
BENCHMARK(BM_PhiloxUniform);

static void BM_PhiloxNormal(benchmark::State& state) {
  numerics::RngStream rng(1, 2);
  for (auto _ : state) benchmark::DoNotOptimize(rng.normal());
}
BENCHMARK(BM_PhiloxNormal);

static void BM_MedianEstimate(benchmark::State& state) {
  const auto L = static_cast<std::size_t>(state.range(0));
  numerics::RngStream rng(7, 0);
  std::vector<double> u(L);
  for (auto& v : u) v = rng.normal();
  const estimators::EstimatorSpec spec;
  for (auto _ : state) benchmark::DoNotOptimize(estimators::estimate(spec, u));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MedianEstimate)->Arg(101)->Arg(1001)->Arg(10001);

static void BM_DistortionPoint(benchmark::State& state) {
  harness::ExperimentConfig c;
  c.channel = testchannels::TestChannelSpec::additive_gaussian(10.0);
  c.trials = 256;
  c.L_grid = {static_cast<std::size_t>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(harness::run_distortion_point(c, c.L_grid[0]).distortion.mean);
}
BENCHMARK(BM_DistortionPoint)->Arg(101)->Arg(1001)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

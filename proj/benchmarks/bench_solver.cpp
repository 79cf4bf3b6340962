#include <benchmark/benchmark.h>

#include <random>

#include "ttqc/grape.hpp"

namespace {

using namespace ttqc;

constexpr double kTwoPi = 6.283185307179586;

LiouvilleModel make_model(int sites) {
  SpinChainSpec spec{sites, kTwoPi, kTwoPi, kTwoPi};
  return build_model(spec, {{0, Axis::z}});
}

// Evolve away from the rank-one product state first so the timed step sees
// the ranks a long run actually works at.
TTVector evolved_state(const LiouvilleModel& model, int warmup_intervals,
                       const TamenOptions& opts) {
  std::vector<int> bits(model.chain.sites, 1);
  bits.front() = 0;
  TTVector rho = build_pure_density_tt(bits);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> amp(-1.0, 1.0);
  for (int n = 0; n < warmup_intervals; ++n) {
    RealVector c(1);
    c[0] = amp(rng);
    rho = tamen_step(interval_generator(model, c), rho, 0.01, opts).state;
  }
  return rho;
}

TamenOptions run_options() {
  TamenOptions opts;
  opts.solver.tolerance = 1e-5;
  opts.solver.truncation_eps = 1e-6;
  return opts;
}

void bm_tamen_step(benchmark::State& state) {
  const int sites = static_cast<int>(state.range(0));
  LiouvilleModel model = make_model(sites);
  TamenOptions opts = run_options();
  TTVector rho = evolved_state(model, 50, opts);
  RealVector c(1);
  c[0] = 0.3;
  TTOperator gen = interval_generator(model, c);
  for (auto _ : state) {
    benchmark::DoNotOptimize(tamen_step(gen, rho, 0.01, opts));
  }
}
BENCHMARK(bm_tamen_step)->Arg(3)->Arg(5)->Arg(7)->Unit(benchmark::kMillisecond);

void bm_gradient_pass(benchmark::State& state) {
  const int intervals = static_cast<int>(state.range(0));
  LiouvilleModel model = make_model(5);
  TamenOptions opts = run_options();
  TTVector rho0 = evolved_state(model, 50, opts);
  std::vector<int> bits(5, 1);
  bits.back() = 0;
  TTVector target = build_pure_density_tt(bits);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> amp(-1.0, 1.0);
  RealMatrix pulses(intervals, 1);
  for (int n = 0; n < intervals; ++n) pulses(n, 0) = amp(rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        grape_gradient(model, pulses, rho0, target, 0.01, opts));
  }
}
BENCHMARK(bm_gradient_pass)->Arg(5)->Arg(10)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

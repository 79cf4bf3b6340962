#include <benchmark/benchmark.h>

#include <random>

#include "ttqc/tensor_train.hpp"

namespace {

using namespace ttqc;

TTVector make_state(int sites, int rank, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<int> modes(sites, 4);
  std::vector<int> ranks(sites - 1, rank);
  return tt_random(modes, ranks, rng);
}

void bm_round(benchmark::State& state) {
  const int sites = static_cast<int>(state.range(0));
  const int rank = static_cast<int>(state.range(1));
  TTVector x = make_state(sites, rank, 1234);
  TTVector doubled = tt_axpy(Complex(1.0, 0.0), x, x);
  for (auto _ : state) {
    benchmark::DoNotOptimize(tt_round(doubled, {1e-10, 0}));
  }
}
BENCHMARK(bm_round)->Args({6, 8})->Args({11, 8})->Args({11, 16})->Args({21, 16});

void bm_dot(benchmark::State& state) {
  const int sites = static_cast<int>(state.range(0));
  const int rank = static_cast<int>(state.range(1));
  TTVector x = make_state(sites, rank, 7);
  TTVector y = make_state(sites, rank, 8);
  for (auto _ : state) {
    benchmark::DoNotOptimize(tt_dot(x, y));
  }
}
BENCHMARK(bm_dot)->Args({11, 16})->Args({21, 16})->Args({21, 32});

void bm_orthogonalize(benchmark::State& state) {
  const int sites = static_cast<int>(state.range(0));
  const int rank = static_cast<int>(state.range(1));
  TTVector x = make_state(sites, rank, 21);
  for (auto _ : state) {
    benchmark::DoNotOptimize(orthogonalize(x, 0));
  }
}
BENCHMARK(bm_orthogonalize)->Args({11, 16})->Args({21, 16});

}  // namespace

BENCHMARK_MAIN();

// Serial reference sweep against the OpenMP sweep over the energy grid.

#include <benchmark/benchmark.h>

#include "ssf/random_models.hpp"
#include "ssf/sweep.hpp"

namespace {

std::vector<double> grid(double lo, double hi, int n) {
  std::vector<double> out;
  for (int k = 0; k < n; ++k) out.push_back(lo + (hi - lo) * (k + 0.5) / n);
  return out;
}

const ssf::models::ResolventModel& lattice() {
  static const auto model = [] {
    ssf::random::Rng rng(5);
    return ssf::random::lattice_model(3, ssf::random::Signature::Mixed, rng);
  }();
  return *model;
}

const ssf::models::DenseModel& dense() {
  static const auto model = [] {
    ssf::random::Rng rng(5);
    return ssf::random::dense_model(16, 4, ssf::random::Signature::Mixed, rng);
  }();
  return *model;
}

void BM_LatticeSerial(benchmark::State& state) {
  const auto lambdas = grid(-1.9, 1.9, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(ssf::sweep_serial(lattice(), lambdas, {}));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_LatticeParallel(benchmark::State& state) {
  const auto lambdas = grid(-1.9, 1.9, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(ssf::sweep_parallel(lattice(), lambdas, {}, 0));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_DenseSerial(benchmark::State& state) {
  const auto lambdas = ssf::random::gap_points(dense());
  for (auto _ : state) benchmark::DoNotOptimize(ssf::sweep_serial(dense(), lambdas, {}));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(lambdas.size()));
}

void BM_DenseParallel(benchmark::State& state) {
  const auto lambdas = ssf::random::gap_points(dense());
  for (auto _ : state) benchmark::DoNotOptimize(ssf::sweep_parallel(dense(), lambdas, {}, 0));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(lambdas.size()));
}

}  // namespace

BENCHMARK(BM_LatticeSerial)->Arg(101)->Arg(401)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_LatticeParallel)->Arg(101)->Arg(401)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_DenseSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_DenseParallel)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();

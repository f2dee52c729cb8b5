// Serial naive reference vs the library fits (OpenMP over evaluation points)
// and the replication-parallel study driver.
#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "support/reference.hpp"
#include "tvreg/locstat.hpp"
#include "tvreg/parallel.hpp"
#include "tvreg/select.hpp"
#include "tvreg/sim.hpp"
#include "tvreg/smooth.hpp"

using namespace tvreg;

namespace {

Dataset design_a(std::size_t n) {
  GeneratorSpec spec;
  spec.design = Design::A;
  spec.n = n;
  spec.seed = 1;
  return simulate(spec).first;
}

Region region() {
  Region r;
  r.x_box = {{-2.0, 2.0}};
  return r;
}

void BM_ModelI_Reference(benchmark::State& state) {
  const Dataset data = design_a(static_cast<std::size_t>(state.range(0)));
  const BandwidthPlan plan = default_bandwidths(data);
  const auto index = restricted_index(data, region());
  for (auto _ : state) {
    double rss = 0;
    for (std::size_t i : index) {
      const std::vector<double> u{data.row(i)[0]};
      const double e = data.y(i) - *ref::model_I(data, u, data.time(i), plan.b_I, plan.h_I);
      rss += e * e;
    }
    benchmark::DoNotOptimize(rss);
  }
}

void BM_ModelI(benchmark::State& state) {
  const Dataset data = design_a(static_cast<std::size_t>(state.range(0)));
  const BandwidthPlan plan = default_bandwidths(data);
  ScopedWorkers workers(static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(fit_model_I(data, region(), plan.b_I, plan.h_I, epanechnikov()).rss);
}

void BM_ModelII_Reference(benchmark::State& state) {
  const Dataset data = design_a(static_cast<std::size_t>(state.range(0)));
  const BandwidthPlan plan = default_bandwidths(data);
  const auto index = restricted_index(data, region());
  for (auto _ : state) {
    double rss = 0;
    for (std::size_t i : index) {
      const std::vector<double> u{data.row(i)[0]};
      const double e = data.y(i) - *ref::model_II(data, u, plan.h_II);
      rss += e * e;
    }
    benchmark::DoNotOptimize(rss);
  }
}

void BM_ModelII(benchmark::State& state) {
  const Dataset data = design_a(static_cast<std::size_t>(state.range(0)));
  const BandwidthPlan plan = default_bandwidths(data);
  ScopedWorkers workers(static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(fit_model_II(data, region(), plan.h_II, epanechnikov()).rss);
}

void BM_ModelIII_Reference(benchmark::State& state) {
  const Dataset data = design_a(static_cast<std::size_t>(state.range(0)));
  const BandwidthPlan plan = default_bandwidths(data);
  const auto index = restricted_index(data, region());
  for (auto _ : state) {
    double rss = 0;
    for (std::size_t i : index) {
      const double e =
          data.y(i) - ref::dot(ref::regressors(data, i, true), ref::model_III(data, data.time(i), plan.b_III, true));
      rss += e * e;
    }
    benchmark::DoNotOptimize(rss);
  }
}

void BM_ModelIII(benchmark::State& state) {
  const Dataset data = design_a(static_cast<std::size_t>(state.range(0)));
  const BandwidthPlan plan = default_bandwidths(data);
  ScopedWorkers workers(static_cast<int>(state.range(1)));
  for (auto _ : state)
    benchmark::DoNotOptimize(fit_model_III(data, region(), plan.b_III, epanechnikov(), true).rss);
}

void BM_Study(benchmark::State& state) {
  StudyGrid grid;
  grid.designs = {Design::A, Design::C};
  grid.sample_sizes = {250};
  grid.noise_levels = {1.0};
  grid.replications = 8;
  ScopedWorkers workers(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(run_grid(grid).size());
}

void serial_and_parallel(benchmark::internal::Benchmark* b) {
  const int max_workers = std::max(1, omp_get_max_threads());
  for (long n : {500L, 2000L}) {
    b->Args({n, 1});
    if (max_workers > 1) b->Args({n, max_workers});
  }
}

}  // namespace

BENCHMARK(BM_ModelI_Reference)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ModelI)->Apply(serial_and_parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ModelII_Reference)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ModelII)->Apply(serial_and_parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ModelIII_Reference)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ModelIII)->Apply(serial_and_parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Study)
    ->Apply([](benchmark::internal::Benchmark* b) {
      b->Arg(1);
      if (omp_get_max_threads() > 1) b->Arg(omp_get_max_threads());
    })
    ->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

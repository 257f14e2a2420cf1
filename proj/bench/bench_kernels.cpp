// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include "flowlab/experiment.hpp"
#include "flowlab/goodness.hpp"
#include "flowlab/parallel.hpp"

using namespace flowlab;

namespace {

const ScalarField& field() {
  static const ScalarField f =
      polynomial_field(GenPoly::parse("x^3 - 2*x*y + y^2 - 1/5"), 2);
  return f;
}

const BoxRegion kBox({-1.0, 0.5}, {2.0, 1.5});

SampleRegion region(std::size_t grid) {
  SampleRegion r;
  r.box = BoxRegion({0.0, 0.0}, {100.0, 10.0});
  r.grid = grid;
  return r;
}

const PolyMatrix& theta() {
  static const PolyMatrix m = PolyMatrix::parse("[[1 + x*y, x], [y, 1]]");
  return m;
}

const std::vector<TestFunction> kObs{{TestKind::indicator_ball, 1.0}};

void BM_grid_values_serial(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(reference::grid_values(field(), kBox, n, GridKind::midpoint));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n));
}

void BM_grid_values_parallel(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(grid_values(field(), kBox, n, GridKind::midpoint));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n));
}

void BM_box_stats_serial(benchmark::State& state) {
  const auto r = region(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(reference::box_stats(theta(), r, kObs, {0.1}));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(r.count()));
}

void BM_box_stats_parallel(benchmark::State& state) {
  const auto r = region(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(box_stats(theta(), r, kObs, {0.1}));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(r.count()));
}

}  // namespace

BENCHMARK(BM_grid_values_serial)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_grid_values_parallel)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_box_stats_serial)->Arg(100)->Arg(300)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_box_stats_parallel)->Arg(100)->Arg(300)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

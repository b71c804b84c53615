#include <benchmark/benchmark.h>

#include "bsp/geometry.hpp"
#include "bsp/measure.hpp"
#include "bsp/process.hpp"
#include "bsp/rng.hpp"

namespace {

using namespace bsp;

ConvexPolygon regular_polygon(int n) {
  std::vector<Point2> v;
  for (int k = 0; k < n; ++k) {
    const double a = 2.0 * M_PI * k / n;
    v.push_back({std::cos(a), std::sin(a)});
  }
  return ConvexPolygon(std::move(v));
}

void BM_SampleSplit(benchmark::State& state) {
  const ConvexPolygon poly = regular_polygon(static_cast<int>(state.range(0)));
  const DirectionWeight w = DirectionWeight::uniform();
  Rng rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(sample_split(poly, w, rng));
}
BENCHMARK(BM_SampleSplit)->Arg(4)->Arg(12)->Arg(64);

void BM_SampleDirection(benchmark::State& state) {
  const ConvexPolygon square = ConvexPolygon::unit_square();
  const DirectionWeight w = DirectionWeight::uniform();
  Rng rng(2);
  for (auto _ : state) benchmark::DoNotOptimize(sample_direction(square, w, rng));
}
BENCHMARK(BM_SampleDirection);

void BM_SampleBsp(benchmark::State& state) {
  const ConvexPolygon square = ConvexPolygon::unit_square();
  const DirectionWeight w = state.range(1) ? DirectionWeight::axis_aligned() : DirectionWeight::uniform();
  Rng rng(3);
  std::size_t leaves = 0;
  for (auto _ : state) {
    const BspTree t = sample_bsp(square, static_cast<double>(state.range(0)), w, rng);
    leaves += t.num_leaves();
  }
  state.counters["leaves"] = benchmark::Counter(static_cast<double>(leaves), benchmark::Counter::kAvgIterations);
}
BENCHMARK(BM_SampleBsp)->Args({2, 0})->Args({8, 0})->Args({8, 1})->Unit(benchmark::kMicrosecond);

void BM_Locate(benchmark::State& state) {
  Rng rng(4);
  const BspTree t = sample_bsp(ConvexPolygon::unit_square(), 10.0, DirectionWeight::uniform(), rng);
  const PartitionSnapshot snap = final_partition(t);
  for (auto _ : state) benchmark::DoNotOptimize(locate(snap, {rng.uniform(), rng.uniform()}));
}
BENCHMARK(BM_Locate);

}  // namespace

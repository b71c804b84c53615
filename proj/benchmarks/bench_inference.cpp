#include <benchmark/benchmark.h>

#include "bsp/inference.hpp"
#include "bsp/relational.hpp"

namespace {

using namespace bsp;

LabelledPoints random_labels(Rng& rng, std::size_t n) {
  LabelledPoints d;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 p{rng.uniform(), rng.uniform()};
    d.points.push_back(p);
    d.labels.push_back(p.x + p.y < 1.0 ? 0 : 1);
  }
  return d;
}

void BM_CsmcSweep(benchmark::State& state) {
  Rng rng(5);
  const LabelledPoints data = random_labels(rng, static_cast<std::size_t>(state.range(1)));
  const auto lik = BlockLikelihood::beta_bernoulli(0.5, 0.5);
  CsmcConfig cfg;
  cfg.num_particles = static_cast<std::size_t>(state.range(0));
  cfg.budget = 4.0;
  BspTree reference = sample_bsp(ConvexPolygon::unit_square(), cfg.budget, cfg.weight, rng);
  std::uint64_t k = 0;
  for (auto _ : state) {
    reference = csmc_sweep(data, lik, cfg, reference, rng.split(Stream::kUser, k++));
  }
}
BENCHMARK(BM_CsmcSweep)->Args({20, 500})->Args({20, 5000})->Args({50, 500})->Unit(benchmark::kMillisecond);

void BM_MhCoordinates(benchmark::State& state) {
  Rng rng(6);
  const auto n = static_cast<std::size_t>(state.range(0));
  const PlantedRelational pl = generate_relational(n, 4.0, DirectionWeight::uniform(), 0.5, 0.5, rng);
  const auto lik = BlockLikelihood::beta_bernoulli(0.5, 0.5);
  Coordinates c = pl.coords;
  for (auto _ : state) c = mh_update_coordinates(pl.dataset, c, pl.tree, lik, rng);
}
BENCHMARK(BM_MhCoordinates)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

}  // namespace

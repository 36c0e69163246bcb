#include <benchmark/benchmark.h>

#include "asplat/gradients.hpp"
#include "asplat/raster.hpp"

using namespace asplat;

namespace {

constexpr int kSize = 256;

void BM_Rasterize(benchmark::State& state, ShadeScheme scheme) {
  const auto scene = random_scene(static_cast<std::size_t>(state.range(0)), kSize, kSize, 3);
  RasterConfig cfg;
  cfg.scheme = scheme;
  for (auto _ : state) benchmark::DoNotOptimize(rasterize(scene, kSize, kSize, cfg).image.data.data());
  state.SetItemsProcessed(state.iterations() * kSize * kSize);
}
BENCHMARK_CAPTURE(BM_Rasterize, center, ShadeScheme::center())->Arg(256)->Arg(4096)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Rasterize, analytic, ShadeScheme::analytic())->Arg(256)->Arg(4096)->Unit(benchmark::kMillisecond);

void BM_RasterizeBackward(benchmark::State& state, ShadeScheme scheme) {
  const auto scene = random_scene(static_cast<std::size_t>(state.range(0)), kSize, kSize, 3);
  RasterConfig cfg;
  cfg.scheme = scheme;
  const RasterOutput out = rasterize(scene, kSize, kSize, cfg);
  const Image upstream(kSize, kSize, {0.1, -0.2, 0.3});
  for (auto _ : state) benchmark::DoNotOptimize(rasterize_backward(out.record, upstream).data());
  state.SetItemsProcessed(state.iterations() * kSize * kSize);
}
BENCHMARK_CAPTURE(BM_RasterizeBackward, center, ShadeScheme::center())->Arg(4096)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_RasterizeBackward, analytic, ShadeScheme::analytic())->Arg(4096)->Unit(benchmark::kMillisecond);

}  // namespace

#include <benchmark/benchmark.h>

#include <vector>

#include "asplat/gauss_core.hpp"
#include "asplat/gradients.hpp"
#include "asplat/rng.hpp"
#include "asplat/shading.hpp"

using namespace asplat;

namespace {

struct Case {
  Vec2 pixel;
  Gaussian2D g;
};

std::vector<Case> cases() {
  CounterRng rng(17);
  std::vector<Case> out;
  for (int i = 0; i < 1024; ++i) {
    const double s1 = rng.log_uniform(0.3, 6.6);
    const double s2 = rng.log_uniform(0.3, s1);
    const double t = rng.uniform(0.0, 3.14159);
    const double c = std::cos(t), s = std::sin(t);
    Case k;
    k.g.cov = {c * c * s1 * s1 + s * s * s2 * s2, c * s * (s1 * s1 - s2 * s2), s * s * s1 * s1 + c * c * s2 * s2};
    k.g.opacity = 0.8;
    k.pixel = {rng.uniform(-2 * s1, 2 * s1), rng.uniform(-2 * s1, 2 * s1)};
    out.push_back(k);
  }
  return out;
}

void BM_LogisticCdf(benchmark::State& state) {
  double x = -3.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(logistic_cdf(x));
    x = x > 3.0 ? -3.0 : x + 1e-3;
  }
}
BENCHMARK(BM_LogisticCdf);

void BM_Eigendecompose(benchmark::State& state) {
  const auto cs = cases();
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(eigendecompose(cs[i].g.cov));
    i = (i + 1) % cs.size();
  }
}
BENCHMARK(BM_Eigendecompose);

void BM_Shade(benchmark::State& state, ShadeScheme scheme) {
  const auto cs = cases();
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(shade(cs[i].pixel, cs[i].g, scheme));
    i = (i + 1) % cs.size();
  }
}
BENCHMARK_CAPTURE(BM_Shade, center, ShadeScheme::center());
BENCHMARK_CAPTURE(BM_Shade, supersample4, ShadeScheme::supersample(4));
BENCHMARK_CAPTURE(BM_Shade, prefilter, ShadeScheme::prefilter(0.1));
BENCHMARK_CAPTURE(BM_Shade, analytic, ShadeScheme::analytic());

void BM_ShadeAnalyticWithGradient(benchmark::State& state) {
  const auto cs = cases();
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(shade_analytic(cs[i].pixel, cs[i].g, true));
    i = (i + 1) % cs.size();
  }
}
BENCHMARK(BM_ShadeAnalyticWithGradient);

}  // namespace

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "asplat/gradients.hpp"
#include "asplat/raster.hpp"
#include "asplat/rng.hpp"

namespace asplat {

bool GradCheckReport::passed() const {
  return max_rel_mean <= tolerances.mean && max_rel_cov <= tolerances.cov &&
         max_rel_opacity <= tolerances.opacity && max_rel_color <= tolerances.color;
}

std::string GradCheckReport::table() const {
  std::string out;
  char line[128];
  std::snprintf(line, sizeof line, "%-8s %12s %12s  %s\n", "class", "max_rel_err", "tolerance", "status");
  out += line;
  auto row = [&](const char* name, double err, double tol) {
    std::snprintf(line, sizeof line, "%-8s %12.3e %12.1e  %s\n", name, err, tol, err <= tol ? "ok" : "FAIL");
    out += line;
  };
  row("mean", max_rel_mean, tolerances.mean);
  row("cov", max_rel_cov, tolerances.cov);
  row("opacity", max_rel_opacity, tolerances.opacity);
  row("color", max_rel_color, tolerances.color);
  std::snprintf(line, sizeof line, "%zu gaussians, %zu parameters: %s\n", gaussians, parameters,
                passed() ? "PASS" : "FAIL");
  out += line;
  return out;
}

std::vector<Gaussian2D> random_scene(std::size_t count, int width, int height, std::uint64_t seed) {
  CounterRng rng(seed, 0x5CE7E);
  std::vector<Gaussian2D> scene;
  scene.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Gaussian2D g;
    g.mean = {rng.uniform(0.0, width), rng.uniform(0.0, height)};
    const double s1 = rng.log_uniform(0.35, 6.0);
    const double s2 = rng.log_uniform(0.35, s1);
    const double theta = rng.uniform(0.0, std::numbers::pi);
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    g.cov = {c * c * s1 * s1 + s * s * s2 * s2, c * s * (s1 * s1 - s2 * s2), s * s * s1 * s1 + c * c * s2 * s2};
    g.opacity = rng.uniform(0.1, 0.9);
    g.color = {rng.uniform(), rng.uniform(), rng.uniform()};
    g.depth = rng.uniform(1.0, 10.0);
    scene.push_back(g);
  }
  return scene;
}

namespace {

double relative_error(double analytic, double numeric) {
  return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), 1e-8});
}

}  // namespace

GradCheckReport gradcheck(std::span<const Gaussian2D> scene, int width, int height, std::uint64_t seed,
                          const ShadeScheme& scheme, const GradCheckTolerances& tol) {
  GradCheckReport report;
  report.tolerances = tol;
  report.gaussians = scene.size();
  if (scene.empty()) return report;

  RasterConfig cfg;
  cfg.scheme = scheme;

  CounterRng rng(seed, 0x7A6E7);
  Image target(width, height);
  for (double& v : target.data) v = rng.uniform();

  const RasterOutput base = rasterize(scene, width, height, cfg);
  Image upstream(width, height);
  for (std::size_t i = 0; i < upstream.data.size(); ++i) {
    const double r = base.image.data[i] - target.data[i];
    upstream.data[i] = r > 0.0 ? 1.0 : (r < 0.0 ? -1.0 : 0.0);
  }
  const std::vector<GaussGrad> grads = rasterize_backward(base.record, upstream);

  std::vector<Gaussian2D> work(scene.begin(), scene.end());
  // Central difference of L = sum |C - target|, differenced pixel by pixel so
  // unaffected pixels cancel exactly.
  auto central = [&](double& param, double h) {
    const double saved = param;
    param = saved + h;
    const Image plus = rasterize(work, width, height, cfg).image;
    param = saved - h;
    const Image minus = rasterize(work, width, height, cfg).image;
    param = saved;
    double diff = 0.0;
    for (std::size_t i = 0; i < plus.data.size(); ++i)
      if (plus.data[i] != minus.data[i])
        diff += std::abs(plus.data[i] - target.data[i]) - std::abs(minus.data[i] - target.data[i]);
    return diff / (2.0 * h);
  };

  for (std::size_t i = 0; i < work.size(); ++i) {
    Gaussian2D& g = work[i];
    const GaussGrad& a = grads[i];
    constexpr double h_mean = 1e-5;
    report.max_rel_mean = std::max(report.max_rel_mean, relative_error(a.d_mean.x, central(g.mean.x, h_mean)));
    report.max_rel_mean = std::max(report.max_rel_mean, relative_error(a.d_mean.y, central(g.mean.y, h_mean)));

    const double off_scale = std::sqrt(g.cov.s11 * g.cov.s22);
    report.max_rel_cov = std::max(report.max_rel_cov, relative_error(a.d_cov.s11, central(g.cov.s11, 1e-5 * g.cov.s11)));
    report.max_rel_cov = std::max(report.max_rel_cov, relative_error(a.d_cov.s12, central(g.cov.s12, 1e-5 * off_scale)));
    report.max_rel_cov = std::max(report.max_rel_cov, relative_error(a.d_cov.s22, central(g.cov.s22, 1e-5 * g.cov.s22)));

    report.max_rel_opacity = std::max(report.max_rel_opacity, relative_error(a.d_opacity, central(g.opacity, 1e-6)));
    for (int c = 0; c < 3; ++c)
      report.max_rel_color = std::max(report.max_rel_color, relative_error(a.d_color[c], central(g.color[c], 1e-4)));
    report.parameters += 9;
  }
  return report;
}

GradCheckReport gradcheck(std::size_t count, std::uint64_t seed) {
  const std::vector<Gaussian2D> scene = random_scene(count, 32, 32, seed);
  return gradcheck(scene, 32, 32, seed);
}

}  // namespace asplat

#pragma once

// Closed-form backward pass of the analytic window-integral response, the
// per-pixel blending backward, and a finite-difference gradient checker.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "asplat/blend.hpp"
#include "asplat/gauss_core.hpp"
#include "asplat/shading.hpp"

namespace asplat {

/// Below lambda1 - lambda2 < kIsotropicEpsilon * max(lambda1, 1) the
/// eigenvector term is dropped (its 1/(lambda1 - lambda2) factor is 0 * inf).
inline constexpr double kIsotropicEpsilon = 1e-6;

/// Unclamped analytic response together with every intermediate partial.
struct AnalyticGradient {
  double response = 0.0;
  Vec2 d_mean;
  SymMat2 d_cov;
  double d_lambda1 = 0.0;
  double d_lambda2 = 0.0;
  Vec2 d_v1;
  Vec2 d_v2;
  bool isotropic_fallback = false;
};

/// Gradient of the (pre-clamp) analytic response at offset = pixel - mean.
AnalyticGradient analytic_gradient(const EigenDecomp2& frame, Vec2 offset);

/// dI/dmean of shade_analytic (zero where the response is clamped).
Vec2 grad_analytic_mean(Vec2 pixel, const Gaussian2D& g);

/// dI/dcov of shade_analytic. The s12 entry aggregates both off-diagonal slots.
SymMat2 grad_analytic_cov(Vec2 pixel, const Gaussian2D& g);

/// Gradient of a scalar loss with respect to one screen-space Gaussian.
struct GaussGrad {
  Vec2 d_mean;
  SymMat2 d_cov;
  double d_opacity = 0.0;
  Rgb d_color;

  GaussGrad& operator+=(const GaussGrad& o) {
    d_mean += o.d_mean;
    d_cov += o.d_cov;
    d_opacity += o.d_opacity;
    d_color += o.d_color;
    return *this;
  }
};

/// Backward of a single pixel's blend over depth-sorted Gaussians shaded with
/// `scheme` (CenterSample or Analytic), given dL/dC. No covariance clamping or
/// dilation is applied: the Gaussians are shaded exactly as given.
std::vector<GaussGrad> grad_blend(Vec2 pixel, std::span<const Gaussian2D> sorted,
                                  const Rgb& upstream, const ShadeScheme& scheme = ShadeScheme::analytic(),
                                  const Rgb& background = {}, const BlendOptions& opt = {});

/// Forward of the same single-pixel blend.
Rgb blend_pixel(Vec2 pixel, std::span<const Gaussian2D> sorted,
                const ShadeScheme& scheme = ShadeScheme::analytic(), const Rgb& background = {},
                const BlendOptions& opt = {});

struct GradCheckTolerances {
  double mean = 1e-4;
  double cov = 1e-4;
  double opacity = 1e-5;
  double color = 1e-6;
};

struct GradCheckReport {
  std::size_t gaussians = 0;
  std::size_t parameters = 0;
  double max_rel_mean = 0.0;
  double max_rel_cov = 0.0;
  double max_rel_opacity = 0.0;
  double max_rel_color = 0.0;
  GradCheckTolerances tolerances;

  bool passed() const;
  /// Plain-text table, one row per parameter class.
  std::string table() const;
};

/// Random desk-scale scene: sigmas log-uniform in [0.35, 6], uniform
/// orientation, opacity in [0.1, 0.9], distinct depths.
std::vector<Gaussian2D> random_scene(std::size_t count, int width, int height, std::uint64_t seed);

/// Compares render_backward against central finite differences of
/// L = sum |C - target| for a random target, over every parameter of every
/// Gaussian. Uses the deterministic raster mode.
GradCheckReport gradcheck(std::span<const Gaussian2D> scene, int width, int height,
                          std::uint64_t seed, const ShadeScheme& scheme = ShadeScheme::analytic(),
                          const GradCheckTolerances& tol = {});

/// gradcheck on random_scene(count, 32, 32, seed).
GradCheckReport gradcheck(std::size_t count, std::uint64_t seed);

}  // namespace asplat

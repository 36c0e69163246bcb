#pragma once

// Per-pixel response of one screen-space Gaussian under the four schemes
// compared by the renderer: point sampling at the pixel centre, n x n
// super-sampling, Gaussian prefiltering, and the analytic window integral.
//
// Pixel (i, j) covers the window [i, i+1] x [j, j+1] and has its centre at
// (i + 0.5, j + 0.5). Responses are in unit-height units: a flat signal of
// height 1 gives response 1.

#include <optional>
#include <string>
#include <string_view>

#include "asplat/gauss_core.hpp"
#include "asplat/vec.hpp"

namespace asplat {

struct Gaussian2D {
  Vec2 mean;          // px
  SymMat2 cov;        // px^2
  double opacity = 1.0;
  Rgb color;
  double depth = 1.0;  // camera-space z, used for sorting only
};

struct ShadeScheme {
  enum class Kind { CenterSample, SuperSample, Prefilter, Analytic };

  Kind kind = Kind::Analytic;
  int samples = 2;        // SuperSample grid size n (n x n)
  double sigma_w = 0.1;   // Prefilter kernel standard deviation, px

  static ShadeScheme center() { return {Kind::CenterSample, 1, 0.1}; }
  static ShadeScheme supersample(int n) { return {Kind::SuperSample, n, 0.1}; }
  static ShadeScheme prefilter(double sigma_w = 0.1) { return {Kind::Prefilter, 1, sigma_w}; }
  static ShadeScheme analytic() { return {Kind::Analytic, 1, 0.1}; }

  /// True for schemes with a backward pass (CenterSample, Analytic).
  bool differentiable() const { return kind == Kind::CenterSample || kind == Kind::Analytic; }

  /// "center", "supersample2", "prefilter0.1", "analytic".
  std::string label() const;

  /// Inverse of label(); also accepts "supersample:4" and "prefilter:0.2".
  /// Returns nullopt for unknown names or out-of-range parameters.
  static std::optional<ShadeScheme> parse(std::string_view text);

  bool operator==(const ShadeScheme&) const = default;
};

struct ShadeResult {
  double response = 0.0;
  Vec2 d_mean;       // dI / d mean
  SymMat2 d_cov;     // dI / d cov; d_cov.s12 is the total derivative w.r.t. the shared off-diagonal
  bool clamped = false;
};

/// exp(-0.5 d^T cov^-1 d), d = pixel - mean. Throws DomainError if cov is singular.
double shade_center(Vec2 pixel, const Gaussian2D& g);

/// Mean of shade_center over a regular n x n subgrid of the pixel window.
double shade_supersample(Vec2 pixel, const Gaussian2D& g, int n);

/// Point sample of g convolved with an isotropic Gaussian of std sigma_w,
/// scaled by sqrt(|cov| / |cov + sigma_w^2 I|) so the signal mass is preserved.
double shade_prefilter(Vec2 pixel, const Gaussian2D& g, double sigma_w);

/// Analytic window integral in the eigen-frame of g.cov, clamped to [0, 1].
/// Gradients are filled only when want_grad is set, and are zero where the
/// clamp is active.
ShadeResult shade_analytic(Vec2 pixel, const Gaussian2D& g, bool want_grad);

/// Dispatch on scheme.kind.
double shade(Vec2 pixel, const Gaussian2D& g, const ShadeScheme& scheme);

/// Core of shade_analytic on a precomputed eigen-frame; offset = pixel - mean.
/// pre_clamp, when non-null, receives the value before clamping.
ShadeResult analytic_response(const EigenDecomp2& frame, Vec2 offset, bool want_grad,
                              double* pre_clamp = nullptr);

/// Core of shade_center on a precomputed conic. Returns the response and,
/// when grads is non-null, dI/dmean and dI/dcov.
double center_response(const Conic2& conic, Vec2 offset, ShadeResult* grads = nullptr);

}  // namespace asplat

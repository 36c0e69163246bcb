#include "asplat/gradients.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "asplat/errors.hpp"

namespace asplat {

namespace {

struct EigenTerms {
  double response = 0.0;
  double dr_dux = 0.0;
  double dr_duy = 0.0;
  double d_lambda1 = 0.0;
  double d_lambda2 = 0.0;
};

// Response and its derivatives for a fixed frame (v1, v2) with variances
// lambda1, lambda2 along it.
EigenTerms eigen_terms(double lambda1, double lambda2, Vec2 v1, Vec2 v2, Vec2 offset) {
  EigenTerms t;
  const double sigma1 = std::sqrt(lambda1);
  const double sigma2 = std::sqrt(lambda2);
  const double ux = dot(v1, offset);
  const double uy = dot(v2, offset);

  const double w1 = window_integral_1d(ux, sigma1);
  const double w2 = window_integral_1d(uy, sigma2);
  const CdfDerivative p1 = cdf_derivative(ux + 0.5, sigma1);
  const CdfDerivative m1 = cdf_derivative(ux - 0.5, sigma1);
  const CdfDerivative p2 = cdf_derivative(uy + 0.5, sigma2);
  const CdfDerivative m2 = cdf_derivative(uy - 0.5, sigma2);

  // I_k = sigma_k * w_k and response = 2 pi I_1 I_2.
  const double i1 = sigma1 * w1;
  const double i2 = sigma2 * w2;
  const double di1_du = sigma1 * (p1.d_x - m1.d_x);
  const double di2_du = sigma2 * (p2.d_x - m2.d_x);
  const double di1_ds = w1 + sigma1 * (p1.d_sigma - m1.d_sigma);
  const double di2_ds = w2 + sigma2 * (p2.d_sigma - m2.d_sigma);

  constexpr double two_pi = 2.0 * std::numbers::pi;
  t.response = two_pi * i1 * i2;
  t.dr_dux = two_pi * i2 * di1_du;
  t.dr_duy = two_pi * i1 * di2_du;
  // sigma = sqrt(lambda).
  t.d_lambda1 = two_pi * i2 * di1_ds / (2.0 * sigma1);
  t.d_lambda2 = two_pi * i1 * di2_ds / (2.0 * sigma2);
  return t;
}

}  // namespace

AnalyticGradient analytic_gradient(const EigenDecomp2& frame, Vec2 offset) {
  AnalyticGradient g;
  if (!(frame.lambda2 > 0.0)) return g;

  const Vec2& v1 = frame.v1;
  const Vec2& v2 = frame.v2;
  const EigenTerms t = eigen_terms(frame.lambda1, frame.lambda2, v1, v2, offset);
  g.response = t.response;
  // u~ = [v1; v2] (pixel - mean), so du~x/dmean = -v1.
  g.d_mean = -(v1 * t.dr_dux + v2 * t.dr_duy);
  g.d_lambda1 = t.d_lambda1;
  g.d_lambda2 = t.d_lambda2;
  g.d_v1 = offset * t.dr_dux;
  g.d_v2 = offset * t.dr_duy;

  const double gap = frame.lambda1 - frame.lambda2;
  if (gap < kIsotropicEpsilon * std::max(frame.lambda1, 1.0)) {
    // The frame is arbitrary here and the response depends on it, so there is
    // no single gradient. Take each partial in the frame its own perturbation
    // selects: the pixel axes for s11 and s22, the diagonals for s12.
    g.isotropic_fallback = true;
    const double lam = 0.5 * (frame.lambda1 + frame.lambda2);
    const EigenTerms axes = eigen_terms(lam, lam, {1.0, 0.0}, {0.0, 1.0}, offset);
    const double r = std::numbers::sqrt2 / 2.0;
    const EigenTerms diag = eigen_terms(lam, lam, {r, r}, {-r, r}, offset);
    g.d_cov.s11 = axes.d_lambda1;
    g.d_cov.s22 = axes.d_lambda2;
    g.d_cov.s12 = diag.d_lambda1 - diag.d_lambda2;
    return g;
  }

  // dlambda_k = v_k^T dSigma v_k; the off-diagonal perturbation touches both slots.
  g.d_cov.s11 = g.d_lambda1 * v1.x * v1.x + g.d_lambda2 * v2.x * v2.x;
  g.d_cov.s22 = g.d_lambda1 * v1.y * v1.y + g.d_lambda2 * v2.y * v2.y;
  g.d_cov.s12 = 2.0 * (g.d_lambda1 * v1.x * v1.y + g.d_lambda2 * v2.x * v2.y);

  // dv1 = (v2^T dS v1)/gap v2 and dv2 = -(v1^T dS v2)/gap v1 collapse to one
  // coefficient on v1^T dS v2.
  const double k = (dot(g.d_v1, v2) - dot(g.d_v2, v1)) / gap;
  g.d_cov.s11 += k * v1.x * v2.x;
  g.d_cov.s22 += k * v1.y * v2.y;
  g.d_cov.s12 += k * (v1.x * v2.y + v1.y * v2.x);
  return g;
}

Vec2 grad_analytic_mean(Vec2 pixel, const Gaussian2D& g) {
  return shade_analytic(pixel, g, true).d_mean;
}

SymMat2 grad_analytic_cov(Vec2 pixel, const Gaussian2D& g) {
  return shade_analytic(pixel, g, true).d_cov;
}

namespace {

ShadeResult shade_with_grad(Vec2 pixel, const Gaussian2D& g, const ShadeScheme& scheme) {
  if (scheme.kind == ShadeScheme::Kind::Analytic) return shade_analytic(pixel, g, true);
  if (scheme.kind == ShadeScheme::Kind::CenterSample) {
    ShadeResult r;
    center_response(conic_from_cov(g.cov), pixel - g.mean, &r);
    return r;
  }
  throw UnsupportedOperation("no backward pass for shading scheme '" + scheme.label() + "'");
}

}  // namespace

Rgb blend_pixel(Vec2 pixel, std::span<const Gaussian2D> sorted, const ShadeScheme& scheme,
                const Rgb& background, const BlendOptions& opt) {
  auto term = [&](int k) {
    const Gaussian2D& g = sorted[static_cast<std::size_t>(k)];
    return BlendTerm{g.opacity * shade(pixel, g, scheme), g.color};
  };
  return blend_forward(static_cast<int>(sorted.size()), term, background, opt).color;
}

std::vector<GaussGrad> grad_blend(Vec2 pixel, std::span<const Gaussian2D> sorted,
                                  const Rgb& upstream, const ShadeScheme& scheme,
                                  const Rgb& background, const BlendOptions& opt) {
  if (!scheme.differentiable())
    throw UnsupportedOperation("no backward pass for shading scheme '" + scheme.label() + "'");

  std::vector<ShadeResult> shaded;
  shaded.reserve(sorted.size());
  for (const Gaussian2D& g : sorted) shaded.push_back(shade_with_grad(pixel, g, scheme));

  auto term = [&](int k) {
    const auto i = static_cast<std::size_t>(k);
    return BlendTerm{sorted[i].opacity * shaded[i].response, sorted[i].color};
  };
  const BlendForward fwd = blend_forward(static_cast<int>(sorted.size()), term, background, opt);

  std::vector<GaussGrad> grads(sorted.size());
  blend_backward(
      fwd, term, background, upstream,
      [&](int k, double d_alpha_response, const Rgb& d_color) {
        const auto i = static_cast<std::size_t>(k);
        GaussGrad& out = grads[i];
        out.d_color += d_color;
        out.d_opacity += d_alpha_response * shaded[i].response;
        const double d_response = d_alpha_response * sorted[i].opacity;
        out.d_mean += shaded[i].d_mean * d_response;
        out.d_cov += shaded[i].d_cov * d_response;
      },
      opt);
  return grads;
}

}  // namespace asplat

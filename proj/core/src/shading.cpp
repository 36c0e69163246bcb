#include "asplat/shading.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

#include "asplat/errors.hpp"
#include "asplat/gradients.hpp"

namespace asplat {

std::string ShadeScheme::label() const {
  std::ostringstream out;
  switch (kind) {
    case Kind::CenterSample:
      return "center";
    case Kind::SuperSample:
      out << "supersample" << samples;
      return out.str();
    case Kind::Prefilter:
      out << "prefilter" << sigma_w;
      return out.str();
    case Kind::Analytic:
      return "analytic";
  }
  return "unknown";
}

namespace {

std::optional<double> parse_number(std::string_view text) {
  if (text.empty()) return std::nullopt;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

std::string_view strip_prefix(std::string_view text, std::string_view prefix) {
  text.remove_prefix(prefix.size());
  if (!text.empty() && (text.front() == ':' || text.front() == '=')) text.remove_prefix(1);
  return text;
}

}  // namespace

std::optional<ShadeScheme> ShadeScheme::parse(std::string_view text) {
  if (text == "center" || text == "centersample") return center();
  if (text == "analytic") return analytic();
  if (text.starts_with("supersample")) {
    auto rest = strip_prefix(text, "supersample");
    if (rest.empty()) return supersample(2);
    auto n = parse_number(rest);
    if (!n || *n < 1 || *n != std::floor(*n) || *n > 64) return std::nullopt;
    return supersample(static_cast<int>(*n));
  }
  if (text.starts_with("prefilter")) {
    auto rest = strip_prefix(text, "prefilter");
    if (rest.empty()) return prefilter(0.1);
    auto s = parse_number(rest);
    if (!s || !(*s > 0.0)) return std::nullopt;
    return prefilter(*s);
  }
  return std::nullopt;
}

double center_response(const Conic2& conic, Vec2 d, ShadeResult* grads) {
  const double power = -0.5 * (conic.a * d.x * d.x + conic.c * d.y * d.y) - conic.b * d.x * d.y;
  const double r = std::exp(power);
  if (grads != nullptr) {
    // w = cov^-1 d; dI/dmean = I w, dI/dcov = I/2 w w^T.
    const Vec2 w{conic.a * d.x + conic.b * d.y, conic.b * d.x + conic.c * d.y};
    grads->response = r;
    grads->d_mean = w * r;
    grads->d_cov = {0.5 * r * w.x * w.x, r * w.x * w.y, 0.5 * r * w.y * w.y};
    grads->clamped = false;
  }
  return r;
}

double shade_center(Vec2 pixel, const Gaussian2D& g) {
  return center_response(conic_from_cov(g.cov), pixel - g.mean);
}

double shade_supersample(Vec2 pixel, const Gaussian2D& g, int n) {
  if (n < 1) throw DomainError("super-sampling grid size must be >= 1");
  const Conic2 conic = conic_from_cov(g.cov);
  const Vec2 d = pixel - g.mean;
  double sum = 0.0;
  for (int j = 0; j < n; ++j) {
    const double oy = (j + 0.5) / n - 0.5;
    for (int i = 0; i < n; ++i) {
      const double ox = (i + 0.5) / n - 0.5;
      sum += center_response(conic, {d.x + ox, d.y + oy});
    }
  }
  return sum / (n * n);
}

double shade_prefilter(Vec2 pixel, const Gaussian2D& g, double sigma_w) {
  if (!(sigma_w > 0.0)) throw DomainError("prefilter sigma_w must be positive");
  const double w2 = sigma_w * sigma_w;
  const SymMat2 filtered{g.cov.s11 + w2, g.cov.s12, g.cov.s22 + w2};
  const double det = g.cov.det();
  if (!(det > 0.0)) throw DomainError("covariance is singular");
  const double amplitude = std::sqrt(det / filtered.det());
  return amplitude * center_response(conic_from_cov(filtered), pixel - g.mean);
}

ShadeResult analytic_response(const EigenDecomp2& frame, Vec2 offset, bool want_grad,
                              double* pre_clamp) {
  ShadeResult out;
  const double sigma1 = std::sqrt(frame.lambda1);
  const double sigma2 = std::sqrt(frame.lambda2);
  if (!(sigma2 > 0.0)) {
    // Zero-width signal: the window integral vanishes.
    if (pre_clamp != nullptr) *pre_clamp = 0.0;
    return out;
  }
  const double ux = dot(frame.v1, offset);
  const double uy = dot(frame.v2, offset);
  const double ix = sigma1 * window_integral_1d(ux, sigma1);
  const double iy = sigma2 * window_integral_1d(uy, sigma2);
  const double value = 2.0 * std::numbers::pi * ix * iy;
  if (pre_clamp != nullptr) *pre_clamp = value;

  if (value > 1.0) {
    out.response = 1.0;
    out.clamped = true;
    return out;
  }
  out.response = value;
  if (want_grad) {
    const AnalyticGradient grad = analytic_gradient(frame, offset);
    out.d_mean = grad.d_mean;
    out.d_cov = grad.d_cov;
  }
  return out;
}

ShadeResult shade_analytic(Vec2 pixel, const Gaussian2D& g, bool want_grad) {
  return analytic_response(eigendecompose(g.cov), pixel - g.mean, want_grad);
}

double shade(Vec2 pixel, const Gaussian2D& g, const ShadeScheme& scheme) {
  switch (scheme.kind) {
    case ShadeScheme::Kind::CenterSample:
      return shade_center(pixel, g);
    case ShadeScheme::Kind::SuperSample:
      return shade_supersample(pixel, g, scheme.samples);
    case ShadeScheme::Kind::Prefilter:
      return shade_prefilter(pixel, g, scheme.sigma_w);
    case ShadeScheme::Kind::Analytic:
      return shade_analytic(pixel, g, false).response;
  }
  return 0.0;
}

}  // namespace asplat

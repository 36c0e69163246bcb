#include "asplat/gauss_core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "asplat/errors.hpp"

namespace asplat {
namespace {

void require_positive_sigma(double sigma) {
  if (!(sigma > 0.0)) {
    std::ostringstream msg;
    msg << "sigma must be positive, got " << sigma;
    throw DomainError(msg.str());
  }
}

}  // namespace

double logistic_cdf(double x) {
  const double z = 1.6 * x + 0.07 * x * x * x;
  // Evaluate on the side where exp() cannot overflow; both branches share
  // exp(-|z|) so that S(x) + S(-x) rounds to 1.
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double logistic_cdf_scaled(double x, double sigma) {
  require_positive_sigma(sigma);
  return logistic_cdf(x / sigma);
}

double window_integral_1d(double u, double sigma) {
  require_positive_sigma(sigma);
  // The window is symmetric, so evaluate at -|u| where both CDF values are
  // small and the difference loses no precision in the far tail.
  const double t = -std::abs(u);
  return logistic_cdf((t + 0.5) / sigma) - logistic_cdf((t - 0.5) / sigma);
}

CdfDerivative cdf_derivative(double x, double sigma) {
  require_positive_sigma(sigma);
  const double t = x / sigma;
  // dS/dt is even in t; evaluate S on the negative side where 1 - S does not cancel.
  const double s = logistic_cdf(-std::abs(t));
  const double k = (1.6 + 0.21 * t * t) * s * (1.0 - s);
  return {k / sigma, -k * x / (sigma * sigma)};
}

EigenDecomp2 eigendecompose(const SymMat2& m) {
  const double tr = m.trace();
  const double det = m.det();
  if (det < -1e-12 * tr * tr || m.s11 < 0.0 || m.s22 < 0.0) {
    std::ostringstream msg;
    msg << "covariance is not positive semi-definite (det = " << det << ", s11 = " << m.s11
        << ", s22 = " << m.s22 << ")";
    throw DomainError(msg.str());
  }

  const double diff = m.s11 - m.s22;
  const double gap = std::sqrt(diff * diff + 4.0 * m.s12 * m.s12);

  EigenDecomp2 e;
  e.lambda1 = 0.5 * (tr + gap);
  e.lambda2 = std::max(0.0, 0.5 * (tr - gap));

  const double eps = kOffDiagonalEpsilon * std::max({m.s11, m.s22, 1.0});
  if (std::abs(m.s12) < eps) {
    if (m.s11 >= m.s22) {
      e.v1 = {1.0, 0.0};
    } else {
      e.v1 = {0.0, 1.0};
    }
  } else if (diff >= 0.0) {
    // [lambda1 - s22, s12] is parallel to [s12, lambda1 - s11] with factor
    // (lambda1 - s22) / s12; flip by sign(s12) to keep that orientation.
    const double sign = m.s12 > 0.0 ? 1.0 : -1.0;
    const Vec2 v{sign * 0.5 * (diff + gap), sign * m.s12};
    e.v1 = v * (1.0 / norm(v));
  } else {
    const Vec2 v{m.s12, 0.5 * (-diff + gap)};
    e.v1 = v * (1.0 / norm(v));
  }
  e.v2 = {-e.v1.y, e.v1.x};
  return e;
}

SymMat2 reconstruct(const EigenDecomp2& e) {
  return {e.lambda1 * e.v1.x * e.v1.x + e.lambda2 * e.v2.x * e.v2.x,
          e.lambda1 * e.v1.x * e.v1.y + e.lambda2 * e.v2.x * e.v2.y,
          e.lambda1 * e.v1.y * e.v1.y + e.lambda2 * e.v2.y * e.v2.y};
}

Conic2 conic_from_cov(const SymMat2& m) {
  const double det = m.det();
  if (!(det > 0.0)) {
    std::ostringstream msg;
    msg << "covariance is singular (det = " << det << ")";
    throw DomainError(msg.str());
  }
  const double inv = 1.0 / det;
  return {m.s22 * inv, -m.s12 * inv, m.s11 * inv};
}

}  // namespace asplat

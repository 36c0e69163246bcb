#pragma once

// Scalar numerics shared by every shading scheme: the conditioned logistic
// approximation of the normal CDF, its sigma-scaled form and derivatives,
// 1-px window integrals, and closed-form algebra on 2x2 symmetric matrices.

#include "asplat/vec.hpp"

namespace asplat {

/// Symmetric 2x2 matrix stored as its three independent entries (px^2 when
/// used as a screen-space covariance).
struct SymMat2 {
  double s11 = 0.0;
  double s12 = 0.0;
  double s22 = 0.0;

  constexpr double det() const { return s11 * s22 - s12 * s12; }
  constexpr double trace() const { return s11 + s22; }

  constexpr SymMat2 operator+(const SymMat2& o) const { return {s11 + o.s11, s12 + o.s12, s22 + o.s22}; }
  constexpr SymMat2 operator*(double s) const { return {s11 * s, s12 * s, s22 * s}; }
  constexpr SymMat2& operator+=(const SymMat2& o) {
    s11 += o.s11;
    s12 += o.s12;
    s22 += o.s22;
    return *this;
  }
  constexpr bool operator==(const SymMat2&) const = default;

  static constexpr SymMat2 identity() { return {1.0, 0.0, 1.0}; }
};

/// Entries of the inverse covariance: the quadratic form is a*x^2 + 2*b*x*y + c*y^2.
struct Conic2 {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
};

/// Eigen-frame of a PSD 2x2 matrix. lambda1 >= lambda2 >= 0, v2 = rot90(v1).
struct EigenDecomp2 {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  Vec2 v1{1.0, 0.0};
  Vec2 v2{0.0, 1.0};
};

struct CdfDerivative {
  double d_x = 0.0;
  double d_sigma = 0.0;
};

/// S(x) = 1 / (1 + exp(-1.6 x - 0.07 x^3)). NaN in, NaN out.
double logistic_cdf(double x);

/// S(x / sigma). Throws DomainError when sigma <= 0.
double logistic_cdf_scaled(double x, double sigma);

/// S_sigma(u + 1/2) - S_sigma(u - 1/2): the normalized mass of a N(0, sigma^2)
/// density inside the unit window centred on u.
double window_integral_1d(double u, double sigma);

/// Partials of S_sigma(x) with respect to x and sigma.
CdfDerivative cdf_derivative(double x, double sigma);

/// Closed-form eigendecomposition of a PSD matrix. Throws DomainError if the
/// determinant is below -1e-12 * trace^2.
EigenDecomp2 eigendecompose(const SymMat2& m);

/// lambda1 v1 v1^T + lambda2 v2 v2^T.
SymMat2 reconstruct(const EigenDecomp2& e);

/// Inverse of a positive-definite covariance. Throws DomainError when det <= 0.
Conic2 conic_from_cov(const SymMat2& m);

/// Relative threshold under which |s12| is treated as exactly zero.
inline constexpr double kOffDiagonalEpsilon = 1e-12;

}  // namespace asplat

#pragma once

// Accuracy of the per-pixel response estimates against reference values.
//
// Everything here is in normalized units: a 1D Gaussian integrates to 1, so
// the exact window value is Phi((x+1/2)/sigma) - Phi((x-1/2)/sigma). A
// unit-height response from the shading module converts by dividing by
// sigma * sqrt(2 pi) per axis (2 pi sigma1 sigma2 in 2D).

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "asplat/gauss_core.hpp"
#include "asplat/shading.hpp"
#include "asplat/vec.hpp"

namespace asplat {

/// Standard normal CDF, accurate to ~1e-16 absolute (complementary error function).
double true_cdf(double x);

/// Normal density with standard deviation sigma.
double normal_pdf(double x, double sigma);

/// Adaptive Simpson quadrature of f over [a, b] to absolute tolerance tol.
double quad_1d(const std::function<double(double)>& f, double a, double b, double tol = 1e-13);

/// Exact mass of N(0, sigma^2) on the unit window centred at x, by quadrature.
double window_truth_1d(double x, double sigma);

/// Mass of N(0, cov) on the axis-aligned unit window centred at offset,
/// estimated from an n x n stratified grid jittered by a counter-based RNG.
double mc_2d(const SymMat2& cov, Vec2 offset, std::uint64_t seed, int n = 256);

/// Normalized 1D window estimate of a scheme at offset x.
double scheme_window_1d(const ShadeScheme& scheme, double x, double sigma);

/// Normalized 2D window estimate of a scheme; offset = pixel centre - mean.
double scheme_window_2d(const ShadeScheme& scheme, const SymMat2& cov, Vec2 offset);

/// n log-spaced values from lo to hi inclusive.
std::vector<double> log_spaced(double lo, double hi, int n);

struct ErrorCurve {
  struct Row {
    double param = 0.0;
    std::string scheme;
    double max_error = 0.0;
    double mean_error = 0.0;
  };
  std::string param_name;  // sigma | offset | angle_deg
  std::vector<std::string> schemes;
  std::vector<Row> rows;

  /// Error of `scheme` at `param`; throws std::out_of_range when absent.
  const Row& at(double param, const std::string& scheme) const;

  /// "param,scheme,max_error,mean_error", 9 significant digits, LF endings.
  std::string to_csv() const;
};

/// Valid standard deviations for the curves, px.
inline constexpr double kMinSigma = 0.3;
inline constexpr double kMaxSigma = 6.6;

/// max / mean over x in [0, 6] (step 1e-3) of |S_sigma(x) - Phi(x / sigma)|.
/// Scheme label "logistic".
ErrorCurve e_cdf_curve(const std::vector<double>& sigmas);

/// Window-integral error per scheme over offsets x in [0, 3 sigma] (step 1e-3).
ErrorCurve e_int_curve(const std::vector<double>& sigmas, const std::vector<ShadeScheme>& schemes);

/// 2D window error for cov = R(theta) diag(s1^2, s2^2) R(theta)^T against
/// mc_2d(seed) over offsets within 3 sigma (a grid of half-sigma steps in the
/// Gaussian's own frame). Scheme labels carry the pair, e.g. "analytic@2/0.5".
ErrorCurve rotation_error_curve(const std::vector<double>& angles_deg,
                                const std::vector<std::pair<double, double>>& sigma_pairs,
                                const std::vector<ShadeScheme>& schemes, std::uint64_t seed);

/// analytic, center, supersample2, prefilter0.1.
std::vector<ShadeScheme> default_error_schemes();

}  // namespace asplat

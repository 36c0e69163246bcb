#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "asplat/error_analysis.hpp"
#include "asplat/errors.hpp"
#include "asplat/gauss_core.hpp"
#include "asplat/rng.hpp"

using namespace asplat;

TEST(LogisticCdf, CentreIsOneHalf) { EXPECT_EQ(logistic_cdf(0.0), 0.5); }

TEST(LogisticCdf, PointSymmetry) {
  EXPECT_EQ(logistic_cdf(1.3) + logistic_cdf(-1.3), 1.0);
  for (double x = -8.0; x <= 8.0; x += 0.0137) EXPECT_NEAR(logistic_cdf(x) + logistic_cdf(-x), 1.0, std::numeric_limits<double>::epsilon()) << x;
}

TEST(LogisticCdf, ValueAtOneMatchesHighPrecisionReference) {
  // 40-digit evaluation of 1 / (1 + exp(-1.67)).
  EXPECT_NEAR(logistic_cdf(1.0), 0.8415758211550442, 1e-15);
  EXPECT_LT(std::abs(logistic_cdf(1.0) - 0.841344746068543), 3e-4);
}

TEST(LogisticCdf, NanPropagates) { EXPECT_TRUE(std::isnan(logistic_cdf(std::numeric_limits<double>::quiet_NaN()))); }

TEST(LogisticCdf, SaturatesWithoutOverflow) {
  EXPECT_EQ(logistic_cdf(-1e6), 0.0);
  EXPECT_EQ(logistic_cdf(1e6), 1.0);
}

TEST(LogisticCdf, MonotoneOnGrid) {
  double prev = logistic_cdf(-8.0);
  for (int k = -7999; k <= 8000; ++k) {
    const double cur = logistic_cdf(k * 1e-3);
    ASSERT_LE(prev, cur) << k;
    prev = cur;
  }
}

TEST(LogisticCdfScaled, Examples) {
  EXPECT_EQ(logistic_cdf_scaled(0.0, 2.5), 0.5);
  EXPECT_DOUBLE_EQ(logistic_cdf_scaled(0.7, 0.7), logistic_cdf(1.0));
  // S(0.5) sits 3.81e-4 above Phi(0.5) = 0.691462461274013.
  EXPECT_NEAR(logistic_cdf_scaled(1.0, 2.0), 0.691843072933536, 1e-15);
  EXPECT_NEAR(logistic_cdf_scaled(1.0, 2.0), 0.691462461274013, 3.81e-4);
}

TEST(LogisticCdfScaled, RejectsNonPositiveSigma) {
  EXPECT_THROW(logistic_cdf_scaled(1.0, 0.0), DomainError);
  EXPECT_THROW(logistic_cdf_scaled(1.0, -1.0), DomainError);
}

TEST(WindowIntegral1d, UnitSigmaAtCentre) {
  EXPECT_NEAR(window_integral_1d(0.0, 1.0), 0.38368614586707199, 1e-15);
  // Deviation from the exact 0.382925 is 7.6e-4.
  EXPECT_NEAR(window_integral_1d(0.0, 1.0), 0.382924922548026, 8e-4);
}

TEST(WindowIntegral1d, EvenInOffset) { EXPECT_EQ(window_integral_1d(1.7, 0.5), window_integral_1d(-1.7, 0.5)); }

TEST(WindowIntegral1d, FarTailVanishes) { EXPECT_LT(window_integral_1d(10.0, 1.0), 1e-6); }

TEST(WindowIntegral1d, BoundedAndDecreasingInOffset) {
  for (double sigma : {0.3, 1.0, 6.6}) {
    double prev = window_integral_1d(0.0, sigma);
    EXPECT_GE(prev, 0.0);
    EXPECT_LE(prev, 1.0);
    for (double u = 0.01; u < 4.0 * sigma; u += 0.01) {
      const double cur = window_integral_1d(u, sigma);
      ASSERT_LE(cur, prev + 1e-16) << sigma << " " << u;
      ASSERT_GE(cur, 0.0);
      prev = cur;
    }
  }
}

TEST(WindowIntegral1d, RejectsNonPositiveSigma) { EXPECT_THROW(window_integral_1d(0.0, 0.0), DomainError); }

TEST(CdfDerivative, AtOrigin) {
  const CdfDerivative d = cdf_derivative(0.0, 1.0);
  EXPECT_DOUBLE_EQ(d.d_x, 0.4);
  EXPECT_EQ(d.d_sigma, 0.0);
}

namespace {
void expect_matches_differences(double x, double sigma, double rel) {
  const double h = 1e-5;
  const CdfDerivative d = cdf_derivative(x, sigma);
  const double fx = (logistic_cdf_scaled(x + h, sigma) - logistic_cdf_scaled(x - h, sigma)) / (2 * h);
  const double fs = (logistic_cdf_scaled(x, sigma + h) - logistic_cdf_scaled(x, sigma - h)) / (2 * h);
  EXPECT_NEAR(d.d_x, fx, rel * std::max(std::abs(fx), 1e-12)) << x << " " << sigma;
  EXPECT_NEAR(d.d_sigma, fs, rel * std::max(std::abs(fs), 1e-12)) << x << " " << sigma;
}
}  // namespace

TEST(CdfDerivative, MatchesFiniteDifferences) {
  expect_matches_differences(1.0, 1.0, 1e-6);
  expect_matches_differences(0.5, 2.0, 1e-6);
}

TEST(CdfDerivative, MatchesFiniteDifferencesOnGrid) {
  for (double sigma : {0.3, 1.0, 6.6})
    for (int k = -30; k <= 30; ++k) {
      const double x = k * 0.1 * sigma;
      if (k == 0) continue;  // d_sigma is exactly zero there
      expect_matches_differences(x, sigma, 1e-5);
    }
}

TEST(CdfDerivative, RejectsNonPositiveSigma) { EXPECT_THROW(cdf_derivative(0.0, -2.0), DomainError); }

TEST(Eigendecompose, Identity) {
  const EigenDecomp2 e = eigendecompose(SymMat2::identity());
  EXPECT_EQ(e.lambda1, 1.0);
  EXPECT_EQ(e.lambda2, 1.0);
  EXPECT_EQ(e.v1, (Vec2{1.0, 0.0}));
  EXPECT_EQ(e.v2, (Vec2{0.0, 1.0}));
}

TEST(Eigendecompose, Diagonal) {
  const EigenDecomp2 e = eigendecompose({4.0, 0.0, 1.0});
  EXPECT_EQ(e.lambda1, 4.0);
  EXPECT_EQ(e.lambda2, 1.0);
  EXPECT_EQ(e.v1, (Vec2{1.0, 0.0}));
  EXPECT_EQ(e.v2, (Vec2{0.0, 1.0}));
}

TEST(Eigendecompose, DiagonalWithLargerSecondVariance) {
  const EigenDecomp2 e = eigendecompose({1.0, 0.0, 4.0});
  EXPECT_EQ(e.lambda1, 4.0);
  EXPECT_EQ(e.lambda2, 1.0);
  EXPECT_EQ(e.v1, (Vec2{0.0, 1.0}));
  EXPECT_EQ(e.v2, (Vec2{-1.0, 0.0}));
}

TEST(Eigendecompose, Coupled) {
  const EigenDecomp2 e = eigendecompose({2.0, 1.0, 2.0});
  const double r = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(e.lambda1, 3.0, 1e-14);
  EXPECT_NEAR(e.lambda2, 1.0, 1e-14);
  EXPECT_NEAR(e.v1.x, r, 1e-14);
  EXPECT_NEAR(e.v1.y, r, 1e-14);
  EXPECT_NEAR(e.v2.x, -r, 1e-14);
  EXPECT_NEAR(e.v2.y, r, 1e-14);
}

TEST(Eigendecompose, RejectsIndefinite) {
  EXPECT_THROW(eigendecompose({1.0, 2.0, 1.0}), DomainError);
  EXPECT_THROW(eigendecompose({-1.0, 0.0, 1.0}), DomainError);
}

TEST(Eigendecompose, ToleratesRoundoffBelowZero) {
  // det = -1e-16, well inside -1e-12 * trace^2.
  EXPECT_NO_THROW(eigendecompose({1.0, 1.0 + 5e-17, 1.0}));
}

TEST(Eigendecompose, RandomRoundTrip) {
  CounterRng rng(2024);
  for (int i = 0; i < 1000; ++i) {
    // A A^T of a random 2x2 with entries in [-10, 10] is PSD.
    const double a = rng.uniform(-10, 10), b = rng.uniform(-10, 10), c = rng.uniform(-10, 10), d = rng.uniform(-10, 10);
    const SymMat2 m{a * a + b * b, a * c + b * d, c * c + d * d};
    const EigenDecomp2 e = eigendecompose(m);
    ASSERT_GE(e.lambda1, e.lambda2);
    ASSERT_GE(e.lambda2, 0.0);
    ASSERT_NEAR(norm(e.v1), 1.0, 1e-12);
    ASSERT_NEAR(norm(e.v2), 1.0, 1e-12);
    ASSERT_NEAR(dot(e.v1, e.v2), 0.0, 1e-12);
    const SymMat2 r = reconstruct(e);
    const double scale = std::max(m.s11, m.s22);
    ASSERT_NEAR(r.s11, m.s11, 1e-9 * scale);
    ASSERT_NEAR(r.s12, m.s12, 1e-9 * scale);
    ASSERT_NEAR(r.s22, m.s22, 1e-9 * scale);
  }
}

TEST(Eigendecompose, NearEqualEigenvaluesStayAccurate) {
  const SymMat2 m{1.0 + 1e-7, 1e-9, 1.0};
  const EigenDecomp2 e = eigendecompose(m);
  const double gap = std::sqrt(1e-14 + 4e-18);
  EXPECT_NEAR(e.lambda1 - e.lambda2, gap, 1e-15);
}

TEST(ConicFromCov, Examples) {
  const Conic2 id = conic_from_cov(SymMat2::identity());
  EXPECT_EQ(id.a, 1.0);
  EXPECT_EQ(id.b, 0.0);
  EXPECT_EQ(id.c, 1.0);
  const Conic2 diag = conic_from_cov({2.0, 0.0, 4.0});
  EXPECT_DOUBLE_EQ(diag.a, 0.5);
  EXPECT_DOUBLE_EQ(diag.c, 0.25);
  const Conic2 k = conic_from_cov({2.0, 1.0, 2.0});
  EXPECT_NEAR(k.a, 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(k.b, -1.0 / 3.0, 1e-15);
  EXPECT_NEAR(k.c, 2.0 / 3.0, 1e-15);
}

TEST(ConicFromCov, InverseTimesMatrixIsIdentity) {
  const SymMat2 m{3.1, -0.7, 0.9};
  const Conic2 k = conic_from_cov(m);
  EXPECT_NEAR(k.a * m.s11 + k.b * m.s12, 1.0, 1e-12);
  EXPECT_NEAR(k.a * m.s12 + k.b * m.s22, 0.0, 1e-12);
  EXPECT_NEAR(k.b * m.s12 + k.c * m.s22, 1.0, 1e-12);
}

TEST(ConicFromCov, RejectsSingular) {
  EXPECT_THROW(conic_from_cov({1.0, 1.0, 1.0}), DomainError);
  EXPECT_THROW(conic_from_cov({0.0, 0.0, 0.0}), DomainError);
}

// The tightest bound the coefficients (1.6, 0.07) achieve; see the
// acceptance binary for the 3e-4 target.
TEST(LogisticCdf, MaxDeviationFromNormalCdfIsPinned) {
  double worst = 0.0;
  for (int k = -6000; k <= 6000; ++k) worst = std::max(worst, std::abs(logistic_cdf(k * 1e-3) - true_cdf(k * 1e-3)));
  EXPECT_NEAR(worst, 3.91995748084e-4, 1e-12);
}

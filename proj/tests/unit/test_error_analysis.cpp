#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "asplat/error_analysis.hpp"
#include "asplat/errors.hpp"

using namespace asplat;

namespace {

// Maclaurin series for erf in long double; converges quickly for |x| <= 3.
long double erf_series(long double x) {
  long double term = x;
  long double sum = x;
  for (int n = 1; n < 200; ++n) {
    term *= -x * x / n;
    sum += term / (2 * n + 1);
  }
  return 2.0L / std::sqrt(std::numbers::pi_v<long double>) * sum;
}

SymMat2 rotated(double theta, double s1, double s2) {
  const double c = std::cos(theta), s = std::sin(theta);
  return {c * c * s1 * s1 + s * s * s2 * s2, c * s * (s1 * s1 - s2 * s2), s * s * s1 * s1 + c * c * s2 * s2};
}

}  // namespace

TEST(TrueCdf, KnownValues) {
  EXPECT_DOUBLE_EQ(true_cdf(0.0), 0.5);
  EXPECT_GT(true_cdf(8.0), 1.0 - 1e-14);
  EXPECT_NEAR(true_cdf(1.0), 0.841344746068543, 1e-15);
  EXPECT_NEAR(true_cdf(-8.0), 6.22096057427178e-16, 1e-28);
}

TEST(TrueCdf, AgreesWithIndependentSeries) {
  for (double x = -3.0; x <= 3.0; x += 0.125) {
    const double series = static_cast<double>(0.5L * (1.0L + erf_series(x / std::sqrt(2.0L))));
    EXPECT_NEAR(true_cdf(x), series, 1e-12) << x;
  }
}

TEST(Quad1d, IntegratesGaussianToErf) {
  for (double s : {0.3, 1.0, 6.6})
    for (double x : {0.0, 0.4, 2.0}) {
      const double got = quad_1d([&](double t) { return normal_pdf(t, s); }, x - 0.5, x + 0.5);
      const double want = true_cdf((x + 0.5) / s) - true_cdf((x - 0.5) / s);
      EXPECT_NEAR(got, want, 1e-10) << s << " " << x;
    }
  EXPECT_NEAR(quad_1d([](double t) { return t * t; }, 0.0, 3.0), 9.0, 1e-12);
}

TEST(WindowTruth1d, MatchesErfDifference) {
  EXPECT_NEAR(window_truth_1d(0.0, 1.0), 0.38292492254802621, 1e-12);
  EXPECT_NEAR(window_truth_1d(1.3, 0.7), window_truth_1d(-1.3, 0.7), 1e-15);
}

TEST(Mc2d, AxisAlignedFactorizes) {
  const SymMat2 cov{1.5 * 1.5, 0.0, 0.8 * 0.8};
  const Vec2 offset{0.6, -0.9};
  const double product = window_truth_1d(0.6, 1.5) * window_truth_1d(-0.9, 0.8);
  EXPECT_NEAR(mc_2d(cov, offset, 7), product, 2e-3);
}

TEST(Mc2d, MatchesDoubleQuadrature) {
  // scipy dblquad of the 2D density over the pixel square.
  EXPECT_NEAR(mc_2d({2, 1, 2}, {0.7, -0.3}, 7) * 2 * std::numbers::pi * std::sqrt(3.0), 0.7424887053828253, 3e-3);
}

TEST(Mc2d, EvenInOffsetAndDeterministic) {
  const SymMat2 cov = rotated(0.4, 2.0, 0.5);
  EXPECT_NEAR(mc_2d(cov, {0.8, 0.3}, 7), mc_2d(cov, {-0.8, -0.3}, 7), 2e-3);
  EXPECT_EQ(mc_2d(cov, {0.8, 0.3}, 7), mc_2d(cov, {0.8, 0.3}, 7));
}

TEST(SchemeWindow1d, AnalyticIsLogisticDifference) {
  EXPECT_NEAR(scheme_window_1d(ShadeScheme::analytic(), 0.0, 1.0), 0.38368614586707199, 1e-12);
  EXPECT_NEAR(scheme_window_1d(ShadeScheme::center(), 0.0, 1.0), normal_pdf(0.0, 1.0), 1e-15);
}

TEST(LogSpaced, Endpoints) {
  const auto v = log_spaced(0.3, 6.6, 32);
  ASSERT_EQ(v.size(), 32u);
  EXPECT_DOUBLE_EQ(v.front(), 0.3);
  EXPECT_NEAR(v.back(), 6.6, 1e-14);
  for (std::size_t i = 1; i < v.size(); ++i) EXPECT_NEAR(v[i] / v[i - 1], v[1] / v[0], 1e-12);
}

TEST(ECdfCurve, OneRowPerSigma) {
  const ErrorCurve c = e_cdf_curve({1.0, 2.0});
  ASSERT_EQ(c.rows.size(), 2u);
  EXPECT_EQ(c.param_name, "sigma");
  EXPECT_NEAR(c.at(1.0, "logistic").max_error, 3.91995748084e-4, 1e-9);
  EXPECT_EQ(c.to_csv().rfind("param,scheme,max_error,mean_error\n", 0), 0u);
}

TEST(EIntCurve, AnalyticWinsAtSmallSigma) {
  const ErrorCurve c = e_int_curve({0.3, 1.0}, default_error_schemes());
  for (double s : {0.3, 1.0}) {
    EXPECT_LT(c.at(s, "analytic").max_error, c.at(s, "center").max_error);
    EXPECT_LT(c.at(s, "analytic").max_error, c.at(s, "prefilter0.1").max_error);
  }
}

TEST(EIntCurve, RejectsOutOfRangeSigma) {
  EXPECT_THROW(e_int_curve({0.2}, default_error_schemes()), DomainError);
  EXPECT_THROW(e_cdf_curve({7.0}), DomainError);
}

TEST(RotationCurve, LabelsAnglesAndDeterminism) {
  const std::vector<double> angles{0, 45};
  const std::vector<std::pair<double, double>> pairs{{2.0, 0.5}};
  const std::vector<ShadeScheme> schemes{ShadeScheme::analytic(), ShadeScheme::center()};
  const ErrorCurve a = rotation_error_curve(angles, pairs, schemes, 7);
  const ErrorCurve b = rotation_error_curve(angles, pairs, schemes, 7);
  EXPECT_EQ(a.to_csv(), b.to_csv());
  EXPECT_EQ(a.param_name, "angle_deg");
  for (double ang : angles) EXPECT_LT(a.at(ang, "analytic@2/0.5").max_error, a.at(ang, "center@2/0.5").max_error);
}

TEST(RotationCurve, Validation) {
  const std::vector<ShadeScheme> schemes{ShadeScheme::analytic()};
  EXPECT_THROW(rotation_error_curve({50}, {{1, 1}}, schemes, 7), DomainError);
  EXPECT_THROW(rotation_error_curve({0}, {{0.5, 1}}, schemes, 7), DomainError);
  EXPECT_THROW(rotation_error_curve({0}, {{7, 1}}, schemes, 7), DomainError);
}

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "asplat/errors.hpp"
#include "asplat/optim.hpp"
#include "asplat/raster.hpp"

using namespace asplat;

namespace {

Image blobs(int w, int h) {
  Image img(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double a = std::exp(-((x - 10.0) * (x - 10.0) + (y - 12.0) * (y - 12.0)) / 30.0);
      const double b = std::exp(-((x - 22.0) * (x - 22.0) + (y - 20.0) * (y - 20.0)) / 18.0);
      img.set(x, y, {0.9 * a + 0.1 * b, 0.2 * a + 0.7 * b, 0.3 * b});
    }
  return img;
}

struct Problem {
  std::vector<Image> targets;
  std::vector<Camera> cameras;
  std::vector<Gaussian3D> init;
  FitConfig cfg;
};

Problem small_problem(int iterations) {
  Problem p;
  p.cfg.iterations = iterations;
  p.cfg.seed = 3;
  p.cfg.scales = {{1}, {2}};
  const Image full = blobs(32, 32);
  p.targets = make_multiscale_targets(full, p.cfg.scales);
  const Camera cam = image_camera(32, 32);
  for (const ScaleSet& s : p.cfg.scales) p.cameras.push_back(scale_camera(cam, s));
  p.init = init_from_target(full, cam, 24, 5);
  return p;
}

double median(std::vector<double> v) {
  std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
  return v[v.size() / 2];
}

}  // namespace

TEST(ScaleWeights, FullResolutionFavoured) {
  EXPECT_EQ(scale_weights(1), (std::vector<double>{1.0}));
  const auto w = scale_weights(4);
  ASSERT_EQ(w.size(), 4u);
  EXPECT_DOUBLE_EQ(w[0], 0.4);
  for (int i = 1; i < 4; ++i) EXPECT_DOUBLE_EQ(w[i], 0.2);
}

TEST(ImageCamera, CentredPrincipalPoint) {
  const Camera c = image_camera(64, 48);
  EXPECT_EQ(c.width, 64);
  EXPECT_EQ(c.height, 48);
  EXPECT_DOUBLE_EQ(c.cx, 32.0);
  EXPECT_DOUBLE_EQ(c.cy, 24.0);
  EXPECT_DOUBLE_EQ(c.fx, 64.0);
}

TEST(InitFromTarget, ProjectsToAboutTwoPixels) {
  const Image full = blobs(32, 32);
  const Camera cam = image_camera(32, 32);
  const auto init = init_from_target(full, cam, 10, 1);
  ASSERT_EQ(init.size(), 10u);
  for (const Gaussian3D& g : init) {
    const auto s = project_gaussian(g, cam);
    ASSERT_TRUE(s.has_value());
    // Exactly 2 px on the optical axis; the perspective Jacobian widens
    // splats toward the image corners.
    const EigenDecomp2 e = eigendecompose(s->cov);
    EXPECT_GE(std::sqrt(e.lambda2), 2.0 - 1e-9);
    EXPECT_LE(std::sqrt(e.lambda1), 2.5);
    EXPECT_NEAR(g.log_scales.x, std::log(2.0 / 32), 1e-12);
    EXPECT_EQ(g.opacity_logit, 0.0);
  }
  EXPECT_EQ(init_from_target(full, cam, 10, 1), init);
}

TEST(Fit, ZeroIterationsReturnsInitVerbatim) {
  const Problem p = small_problem(0);
  const FitResult r = fit(p.targets, p.cameras, p.init, p.cfg);
  EXPECT_EQ(r.gaussians, p.init);
  EXPECT_TRUE(r.report.loss.empty());
}

TEST(Fit, DeterministicTraces) {
  const Problem p = small_problem(40);
  const FitResult a = fit(p.targets, p.cameras, p.init, p.cfg);
  const FitResult b = fit(p.targets, p.cameras, p.init, p.cfg);
  EXPECT_EQ(a.report.trace_csv(), b.report.trace_csv());
  EXPECT_EQ(a.gaussians, b.gaussians);
}

TEST(Fit, MedianLossDecreasesAndParametersStayFinite) {
  const Problem p = small_problem(300);
  const FitResult r = fit(p.targets, p.cameras, p.init, p.cfg);
  const std::vector<double> early(r.report.loss.begin(), r.report.loss.begin() + 100);
  const std::vector<double> late(r.report.loss.begin() + 100, r.report.loss.end());
  EXPECT_LT(median(late), median(early));
  for (const Gaussian3D& g : r.gaussians) {
    EXPECT_TRUE(std::isfinite(g.position.x) && std::isfinite(g.log_scales.x) && std::isfinite(g.opacity_logit));
    for (int k = 0; k < 3; ++k) {
      EXPECT_GE(g.color[k], 0.0);
      EXPECT_LE(g.color[k], 1.0);
    }
  }
  for (int s : r.report.scale) EXPECT_TRUE(s == 1 || s == 2);
}

TEST(Fit, ForwardOnlySchemeIsUnsupported) {
  Problem p = small_problem(5);
  p.cfg.scheme = ShadeScheme::supersample(4);
  EXPECT_THROW(fit(p.targets, p.cameras, p.init, p.cfg), UnsupportedOperation);
}

TEST(Fit, RejectsMismatchedInputs) {
  Problem p = small_problem(5);
  p.cfg.iterations = -1;
  EXPECT_THROW(fit(p.targets, p.cameras, p.init, p.cfg), DomainError);
  p.cfg.iterations = 5;
  p.cameras.pop_back();
  EXPECT_THROW(fit(p.targets, p.cameras, p.init, p.cfg), DomainError);
}

TEST(FitReport, SummaryJsonFields) {
  const Problem p = small_problem(3);
  const FitResult r = fit(p.targets, p.cameras, p.init, p.cfg);
  const std::string json = r.report.summary_json();
  EXPECT_NE(json.find("\"iterations\": 3"), std::string::npos);
  EXPECT_NE(json.find("\"psnr\""), std::string::npos);
  EXPECT_NE(json.find("\"factor\": 2"), std::string::npos);
  EXPECT_EQ(r.report.trace_csv().rfind("iter,scale,loss\n", 0), 0u);
}

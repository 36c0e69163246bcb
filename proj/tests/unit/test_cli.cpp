#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "asplat/image.hpp"
#include "asplat/optim.hpp"
#include "asplat/scene_io.hpp"
#include "cli/commands.hpp"

using namespace asplat;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("asplat_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
    const Camera cam = image_camera(64, 48);
    write_camera(path("cam.json"), cam);
    SceneFile scene;
    Gaussian3D g;
    g.position = {0.0, 0.0, 1.0};
    g.log_scales = {std::log(6.0 / 64), std::log(3.0 / 64), std::log(3.0 / 64)};
    g.rotation = {0.95, 0.0, 0.0, 0.3};
    g.opacity_logit = 1.0;
    g.color = {0.8, 0.3, 0.1};
    scene.gaussians.push_back(g);
    g.position = {0.2, 0.1, 1.5};
    g.color = {0.1, 0.5, 0.9};
    scene.gaussians.push_back(g);
    write_scene(path("scene.json"), scene);
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, RenderIsDeterministicAndScales) {
  const auto a = run_cli({"render", "--scene", path("scene.json"), "--camera", path("cam.json"), "--out", path("a.ppm")});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_NE(a.out.find("rendered 2 gaussians (2 visible) at 64x48"), std::string::npos);
  run_cli({"render", "--scene", path("scene.json"), "--camera", path("cam.json"), "--out", path("b.ppm")});
  EXPECT_EQ(read_text(path("a.ppm")), read_text(path("b.ppm")));

  ASSERT_EQ(run_cli({"render", "--scene", path("scene.json"), "--camera", path("cam.json"), "--scale", "8", "--out",
                     path("small.pfm")})
                .code,
            0);
  const Image small = read_image(path("small.pfm"));
  EXPECT_EQ(small.width, 8);
  EXPECT_EQ(small.height, 6);
}

TEST_F(CliTest, RenderErrors) {
  EXPECT_EQ(run_cli({"render", "--scene", path("missing.json"), "--camera", path("cam.json"), "--out", path("x.ppm")}).code, 3);
  EXPECT_EQ(run_cli({"render", "--scene", path("scene.json"), "--camera", path("cam.json"), "--scheme", "bogus", "--out",
                     path("x.ppm")})
                .code,
            2);
  write_text(path("broken.json"), "{\"gaussians\": 3}");
  EXPECT_EQ(run_cli({"render", "--scene", path("broken.json"), "--camera", path("cam.json"), "--out", path("x.ppm")}).code, 2);
  EXPECT_EQ(run_cli({"render", "--scene", path("scene.json")}).code, 2);
  EXPECT_EQ(run_cli({"nonsense"}).code, 2);
  EXPECT_EQ(run_cli({"--help"}).code, 0);
}

TEST_F(CliTest, FitZeroIterationsKeepsInit) {
  ASSERT_EQ(run_cli({"render", "--scene", path("scene.json"), "--camera", path("cam.json"), "--out", path("t.pfm")}).code, 0);
  const auto r = run_cli({"fit", "--target", path("t.pfm"), "--camera", path("cam.json"), "--init", path("scene.json"),
                          "--iters", "0", "--out", path("fitted.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(read_scene(path("fitted.json")).gaussians, read_scene(path("scene.json")).gaussians);
}

TEST_F(CliTest, FitWritesReportAndErrors) {
  ASSERT_EQ(run_cli({"render", "--scene", path("scene.json"), "--camera", path("cam.json"), "--out", path("t.pfm")}).code, 0);
  const auto r = run_cli({"fit", "--target", path("t.pfm"), "--scales", "1,2", "--gaussians", "8", "--iters", "5",
                          "--seed", "2", "--out", path("f.json"), "--report", path("trace.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(read_text(path("trace.csv")).rfind("iter,scale,loss\n", 0), 0u);
  EXPECT_TRUE(fs::exists(path("trace.json")));
  EXPECT_EQ(run_cli({"fit", "--target", path("nope.pfm"), "--iters", "1"}).code, 3);
  EXPECT_EQ(run_cli({"fit", "--target", path("t.pfm"), "--scheme", "supersample4", "--iters", "1"}).code, 4);
  EXPECT_EQ(run_cli({"fit", "--target", path("t.pfm"), "--iters", "-2"}).code, 2);
}

TEST_F(CliTest, AnalyzeCurves) {
  const auto a = run_cli({"analyze", "--curve", "cdf", "--sigmas", "1"});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out.rfind("param,scheme,max_error,mean_error\n", 0), 0u);
  EXPECT_EQ(run_cli({"analyze", "--curve", "cdf", "--sigmas", "1"}).out, a.out);
  EXPECT_EQ(run_cli({"analyze", "--curve", "int", "--sigmas", "0.1"}).code, 2);
  EXPECT_EQ(run_cli({"analyze", "--curve", "spiral"}).code, 2);

  const auto rot = run_cli({"analyze", "--curve", "rotation", "--seed", "7", "--pairs", "1/1", "--schemes", "analytic"});
  ASSERT_EQ(rot.code, 0) << rot.err;
  EXPECT_NE(rot.out.find("\n0,analytic@1/1,"), std::string::npos);
  EXPECT_NE(rot.out.find("\n45,analytic@1/1,"), std::string::npos);
  EXPECT_EQ(run_cli({"analyze", "--curve", "rotation", "--pairs", "1-1"}).code, 2);
}

TEST_F(CliTest, Gradcheck) {
  const auto zero = run_cli({"gradcheck", "--n", "0"});
  EXPECT_EQ(zero.code, 0);
  EXPECT_NE(zero.out.find("PASS"), std::string::npos);
  EXPECT_EQ(run_cli({"gradcheck", "--n", "1", "--seed", "42"}).code, 0);
  EXPECT_EQ(run_cli({"gradcheck", "--n", "65"}).code, 2);
}

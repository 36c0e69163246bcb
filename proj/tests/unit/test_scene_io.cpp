#include <gtest/gtest.h>

#include <filesystem>

#include "asplat/errors.hpp"
#include "asplat/scene_io.hpp"

using namespace asplat;
namespace fs = std::filesystem;

namespace {

SceneFile sample_scene() {
  SceneFile s;
  Gaussian3D g;
  g.position = {0.1, -0.25, 2.0};
  g.rotation = {0.5, 0.5, 0.5, 0.5};
  g.log_scales = {-3.1, -2.7, -4.0};
  g.opacity_logit = 0.3;
  g.color = {0.9, 0.2, 1.0 / 3.0};
  s.gaussians = {g, g};
  s.gaussians[1].position.z = 3.5;
  s.background = {0.1, 0.2, 0.3};
  return s;
}

}  // namespace

TEST(SceneIo, RoundTripIsExact) {
  const SceneFile s = sample_scene();
  const SceneFile back = parse_scene(scene_to_json(s));
  EXPECT_EQ(back.gaussians, s.gaussians);
  EXPECT_EQ(back.background, s.background);
  EXPECT_EQ(scene_to_json(back), scene_to_json(s));
}

TEST(SceneIo, QuaternionNormalizedAndBackgroundOptional) {
  const SceneFile s = parse_scene(
      R"({"gaussians":[{"position":[0,0,1],"quaternion":[2,0,0,0],"log_scales":[0,0,0],"opacity_logit":0,"color":[1,1,1]}]})");
  ASSERT_EQ(s.gaussians.size(), 1u);
  EXPECT_EQ(s.gaussians[0].rotation, (Quat{1, 0, 0, 0}));
  EXPECT_EQ(s.background, (Rgb{0, 0, 0}));
}

TEST(SceneIo, ErrorsNameTheField) {
  try {
    parse_scene(
        R"({"gaussians":[{"position":[0,0,1],"quaternion":[0,0,0,0],"log_scales":[0,0,0],"opacity_logit":0,"color":[1,1,1]}]})");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("scene.gaussians[0].quaternion"), std::string::npos);
  }
  EXPECT_THROW(parse_scene("{"), ParseError);
  EXPECT_THROW(parse_scene(R"({"gaussians":[{"position":[0,0]}]})"), ParseError);
  EXPECT_THROW(parse_scene(R"({"items":[]})"), ParseError);
}

TEST(CameraIo, RoundTrip) {
  Camera c;
  c.fx = 120.5;
  c.fy = 118.0;
  c.cx = 32;
  c.cy = 24.5;
  c.width = 64;
  c.height = 48;
  c.extrinsic[3] = 0.25;
  EXPECT_EQ(parse_camera(camera_to_json(c)), c);
}

TEST(CameraIo, RejectsBadResolution) {
  EXPECT_THROW(parse_camera(R"({"extrinsic":[1,0,0,0,0,1,0,0,0,0,1,0,0,0,0,1],"fx":1,"fy":1,"cx":0,"cy":0,"width":0,"height":4})"),
               ParseError);
  EXPECT_THROW(parse_camera(R"({"extrinsic":[1,0,0],"fx":1,"fy":1,"cx":0,"cy":0,"width":4,"height":4})"), ParseError);
}

TEST(FileIo, MissingFilesRaiseIoError) {
  EXPECT_THROW(read_scene("/nonexistent/dir/scene.json"), IoError);
  EXPECT_THROW(write_text("/nonexistent/dir/out.txt", "x"), IoError);
  const fs::path p = fs::temp_directory_path() / "asplat_unit_scene.json";
  write_scene(p, sample_scene());
  EXPECT_EQ(read_scene(p).gaussians, sample_scene().gaussians);
}

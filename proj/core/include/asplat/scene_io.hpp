#pragma once

// JSON scene and camera files.
//
// Scene:  {"gaussians": [{"position": [x,y,z], "quaternion": [w,x,y,z],
//          "log_scales": [a,b,c], "opacity_logit": r, "color": [r,g,b]}, ...],
//          "background": [r,g,b]}
// Camera: {"extrinsic": [16 row-major reals], "fx", "fy", "cx", "cy",
//          "width", "height"}

#include <filesystem>
#include <string>
#include <vector>

#include "asplat/project.hpp"

namespace asplat {

struct SceneFile {
  std::vector<Gaussian3D> gaussians;
  Rgb background;
};

/// Quaternions are normalized on load; a zero quaternion is a ParseError.
SceneFile parse_scene(const std::string& text);
std::string scene_to_json(const SceneFile& scene);
SceneFile read_scene(const std::filesystem::path& path);
void write_scene(const std::filesystem::path& path, const SceneFile& scene);

Camera parse_camera(const std::string& text);
std::string camera_to_json(const Camera& cam);
Camera read_camera(const std::filesystem::path& path);
void write_camera(const std::filesystem::path& path, const Camera& cam);

/// Whole-file helpers; throw IoError.
std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace asplat

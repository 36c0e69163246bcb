#include "asplat/scene_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "asplat/errors.hpp"
#include "json.hpp"

namespace asplat {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

const json& field(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.is_object()) throw ParseError(where + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(where + "." + key + ": missing");
  return *it;
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) throw ParseError(where + ": expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ParseError(where + ": not finite");
  return d;
}

std::vector<double> numbers(const json& v, std::size_t n, const std::string& where) {
  if (!v.is_array() || v.size() != n)
    throw ParseError(where + ": expected an array of " + std::to_string(n) + " numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(number(v[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

int positive_int(const json& v, const std::string& where) {
  if (!v.is_number_integer() || v.get<long long>() <= 0) throw ParseError(where + ": expected a positive integer");
  return static_cast<int>(v.get<long long>());
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
}

}  // namespace

SceneFile parse_scene(const std::string& text) {
  const json doc = parse_json(text);
  SceneFile scene;
  const json& list = field(doc, "gaussians", "scene");
  if (!list.is_array()) throw ParseError("scene.gaussians: expected an array");
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string where = "scene.gaussians[" + std::to_string(i) + "]";
    const json& e = list[i];
    Gaussian3D g;
    const auto p = numbers(field(e, "position", where), 3, where + ".position");
    const auto q = numbers(field(e, "quaternion", where), 4, where + ".quaternion");
    const auto s = numbers(field(e, "log_scales", where), 3, where + ".log_scales");
    const auto c = numbers(field(e, "color", where), 3, where + ".color");
    g.position = {p[0], p[1], p[2]};
    const double qn = std::sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]);
    if (qn == 0.0) throw ParseError(where + ".quaternion: zero quaternion");
    g.rotation = {q[0] / qn, q[1] / qn, q[2] / qn, q[3] / qn};
    g.log_scales = {s[0], s[1], s[2]};
    g.opacity_logit = number(field(e, "opacity_logit", where), where + ".opacity_logit");
    g.color = {c[0], c[1], c[2]};
    scene.gaussians.push_back(g);
  }
  if (doc.contains("background")) {
    const auto b = numbers(doc["background"], 3, "scene.background");
    scene.background = {b[0], b[1], b[2]};
  }
  return scene;
}

std::string scene_to_json(const SceneFile& scene) {
  ordered_json doc;
  ordered_json list = ordered_json::array();
  for (const Gaussian3D& g : scene.gaussians) {
    ordered_json e;
    e["position"] = {g.position.x, g.position.y, g.position.z};
    e["quaternion"] = {g.rotation.w, g.rotation.x, g.rotation.y, g.rotation.z};
    e["log_scales"] = {g.log_scales.x, g.log_scales.y, g.log_scales.z};
    e["opacity_logit"] = g.opacity_logit;
    e["color"] = {g.color.r, g.color.g, g.color.b};
    list.push_back(e);
  }
  doc["gaussians"] = list;
  doc["background"] = {scene.background.r, scene.background.g, scene.background.b};
  return doc.dump(2) + "\n";
}

Camera parse_camera(const std::string& text) {
  const json doc = parse_json(text);
  Camera cam;
  const auto ex = numbers(field(doc, "extrinsic", "camera"), 16, "camera.extrinsic");
  std::copy(ex.begin(), ex.end(), cam.extrinsic.begin());
  cam.fx = number(field(doc, "fx", "camera"), "camera.fx");
  cam.fy = number(field(doc, "fy", "camera"), "camera.fy");
  cam.cx = number(field(doc, "cx", "camera"), "camera.cx");
  cam.cy = number(field(doc, "cy", "camera"), "camera.cy");
  cam.width = positive_int(field(doc, "width", "camera"), "camera.width");
  cam.height = positive_int(field(doc, "height", "camera"), "camera.height");
  return cam;
}

std::string camera_to_json(const Camera& cam) {
  ordered_json doc;
  doc["extrinsic"] = cam.extrinsic;
  doc["fx"] = cam.fx;
  doc["fy"] = cam.fy;
  doc["cx"] = cam.cx;
  doc["cy"] = cam.cy;
  doc["width"] = cam.width;
  doc["height"] = cam.height;
  return doc.dump(2) + "\n";
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("cannot read " + path.string());
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw IoError("cannot write " + path.string());
}

SceneFile read_scene(const std::filesystem::path& path) { return parse_scene(read_text(path)); }
void write_scene(const std::filesystem::path& path, const SceneFile& scene) { write_text(path, scene_to_json(scene)); }
Camera read_camera(const std::filesystem::path& path) { return parse_camera(read_text(path)); }
void write_camera(const std::filesystem::path& path, const Camera& cam) { write_text(path, camera_to_json(cam)); }

}  // namespace asplat

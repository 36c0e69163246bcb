#include "asplat/optim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>

#include "json.hpp"

#include "asplat/errors.hpp"
#include "asplat/metrics.hpp"
#include "asplat/rng.hpp"

namespace asplat {

namespace {

constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kAdamEps = 1e-15;

// Flat parameter layout per Gaussian: position(3) quaternion(4) log_scales(3) logit(1) color(3).
constexpr std::size_t kParams = 14;

void pack(const Gaussian3D& g, double* p) {
  p[0] = g.position.x;
  p[1] = g.position.y;
  p[2] = g.position.z;
  p[3] = g.rotation.w;
  p[4] = g.rotation.x;
  p[5] = g.rotation.y;
  p[6] = g.rotation.z;
  p[7] = g.log_scales.x;
  p[8] = g.log_scales.y;
  p[9] = g.log_scales.z;
  p[10] = g.opacity_logit;
  p[11] = g.color.r;
  p[12] = g.color.g;
  p[13] = g.color.b;
}

Gaussian3D unpack(const double* p) {
  Gaussian3D g;
  g.position = {p[0], p[1], p[2]};
  g.rotation = {p[3], p[4], p[5], p[6]};
  g.log_scales = {p[7], p[8], p[9]};
  g.opacity_logit = p[10];
  g.color = {p[11], p[12], p[13]};
  return g;
}

void pack_grad(const Gaussian3DGrad& g, double* p) {
  p[0] = g.d_position.x;
  p[1] = g.d_position.y;
  p[2] = g.d_position.z;
  p[3] = g.d_rotation.w;
  p[4] = g.d_rotation.x;
  p[5] = g.d_rotation.y;
  p[6] = g.d_rotation.z;
  p[7] = g.d_log_scales.x;
  p[8] = g.d_log_scales.y;
  p[9] = g.d_log_scales.z;
  p[10] = g.d_opacity_logit;
  p[11] = g.d_color.r;
  p[12] = g.d_color.g;
  p[13] = g.d_color.b;
}

std::string format_g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace

std::string FitReport::trace_csv() const {
  std::string out = "iter,scale,loss\n";
  for (std::size_t i = 0; i < loss.size(); ++i)
    out += std::to_string(i) + "," + std::to_string(scale[i]) + "," + format_g(loss[i]) + "\n";
  return out;
}

std::string FitReport::summary_json() const {
  nlohmann::ordered_json j;
  j["iterations"] = loss.size();
  j["final_loss"] = loss.empty() ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(loss.back());
  auto metric = [](double v) {
    if (std::isinf(v)) return nlohmann::ordered_json("inf");
    if (std::isnan(v)) return nlohmann::ordered_json(nullptr);
    return nlohmann::ordered_json(v);
  };
  nlohmann::ordered_json scales = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < scale_factors.size(); ++i)
    scales.push_back({{"factor", scale_factors[i]}, {"psnr", metric(final_psnr[i])}, {"ssim", metric(final_ssim[i])}});
  j["scales"] = scales;
  return j.dump(2) + "\n";
}

std::vector<Image> make_multiscale_targets(const Image& image, std::span<const ScaleSet> scales) {
  std::vector<Image> out;
  out.reserve(scales.size());
  for (const ScaleSet& s : scales) out.push_back(s.factor == 1 ? image : bicubic_downsample(image, s.factor));
  return out;
}

std::vector<double> scale_weights(std::size_t count) {
  if (count == 0) return {};
  if (count == 1) return {1.0};
  std::vector<double> w(count, 0.6 / static_cast<double>(count - 1));
  w[0] = 0.4;
  return w;
}

Camera image_camera(int width, int height) {
  Camera cam;
  cam.fx = width;
  cam.fy = width;
  cam.cx = 0.5 * width;
  cam.cy = 0.5 * height;
  cam.width = width;
  cam.height = height;
  return cam;
}

std::vector<Gaussian3D> init_from_target(const Image& target, const Camera& cam, std::size_t count,
                                         std::uint64_t seed, double depth) {
  if (target.width != cam.width || target.height != cam.height)
    throw DomainError("init target does not match the camera resolution");
  CounterRng rng(seed, 0x1417);
  const Mat3 rt = cam.rotation().transposed();
  const Vec3 t = cam.translation();
  const double log_scale = std::log(2.0 * depth / cam.fx);

  std::vector<Gaussian3D> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double u = rng.uniform(0.0, cam.width);
    const double v = rng.uniform(0.0, cam.height);
    const Vec3 cam_point{(u - cam.cx) * depth / cam.fx, (v - cam.cy) * depth / cam.fy, depth};
    Gaussian3D g;
    g.position = rt * (cam_point - t);
    g.log_scales = {log_scale, log_scale, log_scale};
    g.opacity_logit = 0.0;
    const int px = std::min(cam.width - 1, static_cast<int>(u));
    const int py = std::min(cam.height - 1, static_cast<int>(v));
    g.color = target.at(px, py);
    out.push_back(g);
  }
  return out;
}

FitResult fit(std::span<const Image> targets, std::span<const Camera> cameras, std::span<const Gaussian3D> init,
              const FitConfig& cfg) {
  if (!cfg.scheme.differentiable())
    throw UnsupportedOperation("shading scheme '" + cfg.scheme.label() + "' has no backward pass");
  if (cfg.iterations < 0) throw DomainError("iterations must be non-negative");
  if (targets.size() != cameras.size() || targets.size() != cfg.scales.size() || targets.empty())
    throw DomainError("fit needs one target and one camera per scale");
  for (std::size_t i = 0; i < targets.size(); ++i)
    if (targets[i].width != cameras[i].width || targets[i].height != cameras[i].height)
      throw DomainError("target " + std::to_string(i) + " does not match its camera resolution");

  RasterConfig rcfg;
  rcfg.scheme = cfg.scheme;
  rcfg.background = cfg.background;

  const std::size_t n = init.size();
  std::vector<double> params(n * kParams);
  for (std::size_t i = 0; i < n; ++i) pack(init[i], &params[i * kParams]);
  std::vector<double> m(params.size(), 0.0);
  std::vector<double> v(params.size(), 0.0);
  std::vector<double> grad(params.size(), 0.0);

  double lr[kParams];
  std::fill(lr + 0, lr + 3, cfg.lr.position * cfg.scene_extent);
  std::fill(lr + 3, lr + 7, cfg.lr.rotation);
  std::fill(lr + 7, lr + 10, cfg.lr.log_scales);
  lr[10] = cfg.lr.opacity;
  std::fill(lr + 11, lr + 14, cfg.lr.color);

  const std::vector<double> weights = scale_weights(targets.size());
  const CounterRng rng(cfg.seed, 0xF17);

  FitResult result;
  FitReport& report = result.report;
  std::vector<Gaussian3D> current(init.begin(), init.end());

  for (int it = 0; it < cfg.iterations; ++it) {
    const auto start = std::chrono::steady_clock::now();

    const double u = rng.uniform_at(static_cast<std::uint64_t>(it));
    std::size_t s = 0;
    for (double acc = weights[0]; s + 1 < weights.size() && u >= acc; acc += weights[++s]) {
    }

    const SceneRender r = render(current, cameras[s], rcfg);
    const PhotometricLoss loss = photometric_loss(r.image, targets[s], cfg.lambda_dssim);
    const std::vector<Gaussian3DGrad> g3 = render_backward_3d(r, current, cameras[s], loss.d_rendered);
    for (std::size_t i = 0; i < n; ++i) pack_grad(g3[i], &grad[i * kParams]);

    const double bc1 = 1.0 - std::pow(kBeta1, it + 1);
    const double bc2 = 1.0 - std::pow(kBeta2, it + 1);
    for (std::size_t k = 0; k < params.size(); ++k) {
      m[k] = kBeta1 * m[k] + (1.0 - kBeta1) * grad[k];
      v[k] = kBeta2 * v[k] + (1.0 - kBeta2) * grad[k] * grad[k];
      const double mhat = m[k] / bc1;
      const double vhat = v[k] / bc2;
      params[k] -= lr[k % kParams] * mhat / (std::sqrt(vhat) + kAdamEps);
    }
    for (std::size_t i = 0; i < n; ++i) {
      double* p = &params[i * kParams];
      for (int c = 11; c < 14; ++c) p[c] = std::clamp(p[c], 0.0, 1.0);
      current[i] = unpack(p);
    }

    report.loss.push_back(loss.value);
    report.scale.push_back(cfg.scales[s].factor);
    report.seconds.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  }

  // Zero iterations must hand back the input exactly, so reuse it verbatim.
  if (cfg.iterations == 0) current.assign(init.begin(), init.end());

  for (std::size_t s = 0; s < targets.size(); ++s) {
    const SceneRender r = render(current, cameras[s], rcfg);
    report.scale_factors.push_back(cfg.scales[s].factor);
    report.final_psnr.push_back(psnr(r.image, targets[s]));
    const bool ssim_ok = r.image.width >= 11 && r.image.height >= 11;
    report.final_ssim.push_back(ssim_ok ? ssim(r.image, targets[s]) : std::numeric_limits<double>::quiet_NaN());
  }
  result.gaussians = std::move(current);
  return result;
}

}  // namespace asplat

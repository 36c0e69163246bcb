#include "cli/commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <optional>

#include "CLI11.hpp"
#include "asplat/error_analysis.hpp"
#include "asplat/errors.hpp"
#include "asplat/gradients.hpp"
#include "asplat/image.hpp"
#include "asplat/metrics.hpp"
#include "asplat/optim.hpp"
#include "asplat/raster.hpp"
#include "asplat/scene_io.hpp"

namespace asplat::cli {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

ShadeScheme parse_scheme(const std::string& text) {
  auto s = ShadeScheme::parse(text);
  if (!s) throw ParseError("--scheme: unknown shading scheme '" + text + "'");
  return *s;
}

void write_image(const fs::path& path, const Image& img, const std::string& format, bool srgb) {
  if (format == "pfm")
    write_pfm(path, img);
  else
    write_ppm(path, img, srgb);
}

struct RenderArgs {
  std::string scene;
  std::string camera;
  std::string scheme = "analytic";
  int scale = 1;
  std::string out;
  std::string format;
  bool srgb = false;
};

int cmd_render(const RenderArgs& a, std::ostream& out) {
  if (a.scale < 1) throw DomainError("--scale must be a positive integer");
  const ShadeScheme scheme = parse_scheme(a.scheme);
  std::string format = a.format;
  if (format.empty()) format = fs::path(a.out).extension() == ".pfm" ? "pfm" : "ppm";
  if (format != "ppm" && format != "pfm") throw ParseError("--format: expected ppm or pfm, got '" + format + "'");

  const SceneFile scene = read_scene(a.scene);
  const Camera cam = scale_camera(read_camera(a.camera), ScaleSet{a.scale});
  RasterConfig cfg;
  cfg.scheme = scheme;
  cfg.background = scene.background;

  const auto start = Clock::now();
  const SceneRender r = render(scene.gaussians, cam, cfg);
  const double ms = elapsed_ms(start);
  write_image(a.out, r.image, format, a.srgb);

  char line[160];
  std::snprintf(line, sizeof line, "rendered %zu gaussians (%zu visible) at %dx%d in %.2f ms\n",
                scene.gaussians.size(), r.splats.size(), cam.width, cam.height, ms);
  out << line;
  return kOk;
}

struct FitArgs {
  std::vector<std::string> targets;
  std::string camera;
  std::string init;
  std::string scheme = "analytic";
  std::vector<int> scales{1, 2, 4, 8};
  int iters = 1000;
  std::uint64_t seed = 0;
  std::size_t gaussians = 256;
  std::string out;
  std::string report;
  bool srgb = false;
};

int cmd_fit(const FitArgs& a, std::ostream& out) {
  FitConfig cfg;
  cfg.scheme = parse_scheme(a.scheme);
  if (!cfg.scheme.differentiable())
    throw UnsupportedOperation("shading scheme '" + cfg.scheme.label() + "' has no backward pass");
  if (a.iters < 0) throw DomainError("--iters must be non-negative");
  cfg.iterations = a.iters;
  cfg.seed = a.seed;
  cfg.scales.clear();
  for (int f : a.scales) {
    if (f < 1) throw DomainError("--scales entries must be positive integers");
    cfg.scales.push_back({f});
  }
  if (cfg.scales.empty()) throw DomainError("--scales must not be empty");

  std::vector<Image> loaded;
  for (const std::string& t : a.targets) loaded.push_back(read_image(t, a.srgb));
  if (loaded.size() != 1 && loaded.size() != cfg.scales.size())
    throw DomainError("give one target image, or one per scale");

  const Camera base = a.camera.empty() ? image_camera(loaded[0].width, loaded[0].height) : read_camera(a.camera);
  std::vector<Camera> cameras;
  for (const ScaleSet& s : cfg.scales) cameras.push_back(scale_camera(base, s));
  const std::vector<Image> targets = loaded.size() == 1 ? make_multiscale_targets(loaded[0], cfg.scales) : loaded;
  for (std::size_t i = 0; i < targets.size(); ++i)
    if (targets[i].width != cameras[i].width || targets[i].height != cameras[i].height)
      throw DomainError("target for scale " + std::to_string(cfg.scales[i].factor) + " is " +
                        std::to_string(targets[i].width) + "x" + std::to_string(targets[i].height) +
                        ", camera expects " + std::to_string(cameras[i].width) + "x" +
                        std::to_string(cameras[i].height));

  SceneFile init;
  if (!a.init.empty())
    init = read_scene(a.init);
  else
    init.gaussians = init_from_target(targets[0], cameras[0], a.gaussians, a.seed);
  cfg.background = init.background;

  const auto start = Clock::now();
  const FitResult result = fit(targets, cameras, init.gaussians, cfg);
  const double ms = elapsed_ms(start);

  SceneFile fitted{result.gaussians, init.background};
  if (!a.out.empty()) write_scene(a.out, fitted);
  if (!a.report.empty()) {
    write_text(a.report, result.report.trace_csv());
    write_text(fs::path(a.report).replace_extension(".json"), result.report.summary_json());
  }

  char line[160];
  std::snprintf(line, sizeof line, "fitted %zu gaussians, %d iterations in %.1f s (%.2f ms/iter)\n",
                fitted.gaussians.size(), a.iters, ms / 1000.0, a.iters > 0 ? ms / a.iters : 0.0);
  out << line;
  for (std::size_t i = 0; i < result.report.scale_factors.size(); ++i) {
    std::snprintf(line, sizeof line, "  scale 1/%d: PSNR %.3f dB  SSIM %.4f\n", result.report.scale_factors[i],
                  result.report.final_psnr[i], result.report.final_ssim[i]);
    out << line;
  }
  return kOk;
}

struct AnalyzeArgs {
  std::string curve;
  std::vector<double> sigmas;
  std::vector<std::string> schemes;
  std::vector<double> angles;
  std::vector<std::string> pairs;
  std::uint64_t seed = 7;
  std::string out;
};

std::pair<double, double> parse_pair(const std::string& text) {
  const auto slash = text.find('/');
  try {
    if (slash == std::string::npos) throw std::invalid_argument(text);
    std::size_t used1 = 0;
    std::size_t used2 = 0;
    const std::string a = text.substr(0, slash);
    const std::string b = text.substr(slash + 1);
    const double s1 = std::stod(a, &used1);
    const double s2 = std::stod(b, &used2);
    if (used1 != a.size() || used2 != b.size()) throw std::invalid_argument(text);
    return {s1, s2};
  } catch (const std::exception&) {
    throw ParseError("--pairs: expected sigma1/sigma2, got '" + text + "'");
  }
}

int cmd_analyze(const AnalyzeArgs& a, std::ostream& out) {
  std::vector<double> sigmas = a.sigmas;
  if (sigmas.empty()) sigmas = log_spaced(kMinSigma, kMaxSigma, 32);
  std::vector<ShadeScheme> schemes;
  for (const std::string& s : a.schemes) schemes.push_back(parse_scheme(s));
  if (schemes.empty()) schemes = default_error_schemes();

  ErrorCurve curve;
  if (a.curve == "cdf") {
    curve = e_cdf_curve(sigmas);
  } else if (a.curve == "int") {
    curve = e_int_curve(sigmas, schemes);
  } else if (a.curve == "rotation") {
    std::vector<double> angles = a.angles;
    if (angles.empty())
      for (int d = 0; d <= 45; d += 5) angles.push_back(d);
    std::vector<std::pair<double, double>> pairs;
    for (const std::string& p : a.pairs) pairs.push_back(parse_pair(p));
    if (pairs.empty()) pairs = {{1.0, 1.0}, {2.0, 0.5}, {6.6, 0.3}};
    curve = rotation_error_curve(angles, pairs, schemes, a.seed);
  } else {
    throw ParseError("--curve: expected cdf, int or rotation, got '" + a.curve + "'");
  }

  const std::string csv = curve.to_csv();
  if (a.out.empty())
    out << csv;
  else
    write_text(a.out, csv);
  return kOk;
}

int cmd_gradcheck(int n, std::uint64_t seed, std::ostream& out) {
  if (n < 0 || n > 64) throw DomainError("--n must lie in [0, 64]");
  const GradCheckReport report = gradcheck(static_cast<std::size_t>(n), seed);
  out << report.table();
  return report.passed() ? kOk : kCheckFailed;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Analytic pixel-window Gaussian splatting", "asplat"};
  app.require_subcommand(1);

  RenderArgs ra;
  auto* render_cmd = app.add_subcommand("render", "Render a scene file to PPM or PFM");
  render_cmd->add_option("--scene", ra.scene, "Scene JSON")->required();
  render_cmd->add_option("--camera", ra.camera, "Camera JSON")->required();
  render_cmd->add_option("--scheme", ra.scheme, "center | supersampleN | prefilterS | analytic");
  render_cmd->add_option("--scale", ra.scale, "Resolution divisor");
  render_cmd->add_option("--out", ra.out, "Output image")->required();
  render_cmd->add_option("--format", ra.format, "ppm or pfm (default: from extension)");
  render_cmd->add_flag("--srgb", ra.srgb, "Encode PPM output with the sRGB curve");

  FitArgs fa;
  auto* fit_cmd = app.add_subcommand("fit", "Fit Gaussians to multi-scale targets");
  fit_cmd->add_option("--target", fa.targets, "Target image: one full-resolution image or one per scale")
      ->required()
      ->delimiter(',');
  fit_cmd->add_option("--camera", fa.camera, "Full-resolution camera JSON (default: image-plane camera)");
  fit_cmd->add_option("--init", fa.init, "Initial scene JSON (default: sampled from the target)");
  fit_cmd->add_option("--scheme", fa.scheme, "center or analytic");
  fit_cmd->add_option("--scales", fa.scales, "Downsampling factors")->delimiter(',');
  fit_cmd->add_option("--iters", fa.iters, "Iterations");
  fit_cmd->add_option("--seed", fa.seed, "Random seed");
  fit_cmd->add_option("--gaussians", fa.gaussians, "Gaussian count when no --init is given");
  fit_cmd->add_option("--out", fa.out, "Fitted scene JSON");
  fit_cmd->add_option("--report", fa.report, "Loss trace CSV (summary goes next to it as .json)");
  fit_cmd->add_flag("--srgb", fa.srgb, "Decode PPM targets with the sRGB curve");

  AnalyzeArgs aa;
  auto* analyze_cmd = app.add_subcommand("analyze", "Write approximation error curves as CSV");
  analyze_cmd->add_option("--curve", aa.curve, "cdf | int | rotation")->required();
  analyze_cmd->add_option("--sigmas", aa.sigmas, "Standard deviations in [0.3, 6.6]")->delimiter(',');
  analyze_cmd->add_option("--schemes", aa.schemes, "Scheme labels")->delimiter(',');
  analyze_cmd->add_option("--angles", aa.angles, "Rotation angles in degrees, 0..45")->delimiter(',');
  analyze_cmd->add_option("--pairs", aa.pairs, "sigma1/sigma2 pairs for the rotation curve")->delimiter(',');
  analyze_cmd->add_option("--seed", aa.seed, "Monte Carlo seed");
  analyze_cmd->add_option("--out", aa.out, "Output CSV (default: stdout)");

  int gc_n = 8;
  std::uint64_t gc_seed = 42;
  auto* gradcheck_cmd = app.add_subcommand("gradcheck", "Compare analytic gradients with finite differences");
  gradcheck_cmd->add_option("--n", gc_n, "Number of random Gaussians (at most 64)");
  gradcheck_cmd->add_option("--seed", gc_seed, "Random seed");

  std::vector<std::string> argv_store{"asplat"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const std::string& s : argv_store) argv.push_back(s.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kBadInput;
  }

  try {
    if (*render_cmd) return cmd_render(ra, out);
    if (*fit_cmd) return cmd_fit(fa, out);
    if (*analyze_cmd) return cmd_analyze(aa, out);
    if (*gradcheck_cmd) return cmd_gradcheck(gc_n, gc_seed, out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kIoError;
  } catch (const UnsupportedOperation& e) {
    err << "error: " << e.what() << "\n";
    return kUnsupported;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kBadInput;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kBadInput;
  }
  return kBadInput;
}

}  // namespace asplat::cli

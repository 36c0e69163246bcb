#pragma once

// Multi-scale image fitting: Adam on world-space Gaussians against targets
// rendered at several resolutions, with an L1 + D-SSIM photometric loss.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "asplat/image.hpp"
#include "asplat/project.hpp"
#include "asplat/raster.hpp"

namespace asplat {

struct LearningRates {
  double position = 2e-4;  // multiplied by FitConfig::scene_extent
  double log_scales = 5e-3;
  double rotation = 1e-3;
  double opacity = 5e-2;
  double color = 2.5e-3;
};

struct FitConfig {
  int iterations = 1000;
  LearningRates lr;
  double lambda_dssim = 0.2;
  std::vector<ScaleSet> scales{{1}};
  std::uint64_t seed = 0;
  ShadeScheme scheme = ShadeScheme::analytic();
  double scene_extent = 1.0;
  Rgb background;
};

struct FitReport {
  std::vector<double> loss;            // per iteration
  std::vector<int> scale;              // factor drawn at each iteration
  std::vector<double> seconds;         // wall clock per iteration
  std::vector<int> scale_factors;      // as configured
  std::vector<double> final_psnr;      // per configured scale
  std::vector<double> final_ssim;      // per configured scale; NaN below the SSIM window size

  /// "iter,scale,loss" rows. Timing is left out so reruns are byte-identical.
  std::string trace_csv() const;
  /// Final metrics per scale and the last loss, as JSON.
  std::string summary_json() const;
};

struct FitResult {
  std::vector<Gaussian3D> gaussians;
  FitReport report;
};

/// Bicubic downsampling of image by each factor, in the given order.
std::vector<Image> make_multiscale_targets(const Image& image, std::span<const ScaleSet> scales);

/// Probability of drawing each scale: 0.4 for the first (full resolution) and
/// the remaining 0.6 split evenly; a single scale gets 1.
std::vector<double> scale_weights(std::size_t count);

/// Pinhole looking down +z whose image plane at depth 1 spans one world unit
/// horizontally: fx = fy = width, principal point at the image centre.
Camera image_camera(int width, int height);

/// count Gaussians at the given depth, uniformly over the image, isotropic
/// with a projected sigma of about 2 px, opacity 0.5, coloured from target.
std::vector<Gaussian3D> init_from_target(const Image& target, const Camera& cam, std::size_t count,
                                         std::uint64_t seed, double depth = 1.0);

/// targets[i] is seen through cameras[i] and corresponds to cfg.scales[i].
/// Throws UnsupportedOperation for schemes without a backward pass.
FitResult fit(std::span<const Image> targets, std::span<const Camera> cameras, std::span<const Gaussian3D> init,
              const FitConfig& cfg);

}  // namespace asplat

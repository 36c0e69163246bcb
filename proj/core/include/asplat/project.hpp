#pragma once

// World-space Gaussians to screen space: R S S^T R^T covariance, pinhole
// projection of the mean, and the affine (EWA) covariance projection
// J W Sigma W^T J^T with J evaluated at the mean.

#include <array>
#include <optional>

#include "asplat/gradients.hpp"
#include "asplat/shading.hpp"
#include "asplat/vec.hpp"

namespace asplat {

/// (w, x, y, z); normalized before use.
struct Quat {
  double w = 1.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  bool operator==(const Quat&) const = default;
};

struct Gaussian3D {
  Vec3 position;
  Quat rotation;
  Vec3 log_scales;
  double opacity_logit = 0.0;
  Rgb color;

  bool operator==(const Gaussian3D&) const = default;
};

struct Camera {
  /// Row-major 4x4 world-to-camera rigid transform.
  std::array<double, 16> extrinsic{1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1};
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 1;
  int height = 1;

  Mat3 rotation() const;
  Vec3 translation() const;
  Vec3 to_camera(const Vec3& world) const { return rotation() * world + translation(); }

  bool operator==(const Camera&) const = default;
};

/// Resolution divisor for multi-scale rendering.
struct ScaleSet {
  int factor = 1;
};

inline constexpr double kNearPlane = 0.01;

double sigmoid(double x);
Mat3 quat_to_rotation(const Quat& q);

/// R diag(exp(2 log_scales)) R^T.
Mat3 cov3d(const Gaussian3D& g);

/// nullopt when the camera-space depth is <= kNearPlane.
std::optional<Gaussian2D> project_gaussian(const Gaussian3D& g, const Camera& cam);

/// Divides focal lengths, principal point, and resolution by the factor.
/// Resolutions round down; the principal point scales proportionally.
Camera scale_camera(const Camera& cam, ScaleSet s);

struct Gaussian3DGrad {
  Vec3 d_position;
  Quat d_rotation;  // w.r.t. the stored (unnormalized) quaternion
  Vec3 d_log_scales;
  double d_opacity_logit = 0.0;
  Rgb d_color;
};

/// Chains a screen-space gradient back to the world-space parameters of g.
/// The caller guarantees g was not culled by cam.
Gaussian3DGrad project_backward(const Gaussian3D& g, const Camera& cam, const GaussGrad& grad2d);

}  // namespace asplat

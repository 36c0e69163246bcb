#include "asplat/project.hpp"

#include <cmath>

#include "asplat/errors.hpp"

namespace asplat {

Mat3 Camera::rotation() const {
  const auto& e = extrinsic;
  return Mat3{{e[0], e[1], e[2], e[4], e[5], e[6], e[8], e[9], e[10]}};
}

Vec3 Camera::translation() const { return {extrinsic[3], extrinsic[7], extrinsic[11]}; }

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

namespace {

Quat normalized(const Quat& q) {
  const double n = std::sqrt(q.w * q.w + q.x * q.x + q.y * q.y + q.z * q.z);
  if (!(n > 0.0)) throw DomainError("quaternion has zero norm");
  return {q.w / n, q.x / n, q.y / n, q.z / n};
}

// Rotation matrix of a unit quaternion (no normalization).
Mat3 unit_quat_to_rotation(const Quat& q) {
  const double w = q.w, x = q.x, y = q.y, z = q.z;
  return Mat3{{1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
               2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
               2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)}};
}

struct Projection {
  Vec3 p_cam;
  Mat3 W;        // world-to-camera rotation
  double J[2][3];
  Mat3 sigma;    // world covariance
};

Projection prepare(const Gaussian3D& g, const Camera& cam) {
  Projection p;
  p.W = cam.rotation();
  p.p_cam = cam.to_camera(g.position);
  const double z = p.p_cam.z;
  p.J[0][0] = cam.fx / z;
  p.J[0][1] = 0.0;
  p.J[0][2] = -cam.fx * p.p_cam.x / (z * z);
  p.J[1][0] = 0.0;
  p.J[1][1] = cam.fy / z;
  p.J[1][2] = -cam.fy * p.p_cam.y / (z * z);
  p.sigma = cov3d(g);
  return p;
}

// T = J W (2x3).
void jw(const Projection& p, double T[2][3]) {
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 3; ++c) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += p.J[r][k] * p.W(k, c);
      T[r][c] = s;
    }
}

}  // namespace

Mat3 quat_to_rotation(const Quat& q) { return unit_quat_to_rotation(normalized(q)); }

Mat3 cov3d(const Gaussian3D& g) {
  const Mat3 R = quat_to_rotation(g.rotation);
  const Mat3 S2 = Mat3::diagonal(std::exp(2.0 * g.log_scales.x), std::exp(2.0 * g.log_scales.y),
                                 std::exp(2.0 * g.log_scales.z));
  return R * S2 * R.transposed();
}

std::optional<Gaussian2D> project_gaussian(const Gaussian3D& g, const Camera& cam) {
  const Vec3 pc = cam.to_camera(g.position);
  if (!(pc.z > kNearPlane)) return std::nullopt;

  const Projection p = prepare(g, cam);
  double T[2][3];
  jw(p, T);
  // T Sigma T^T
  double TS[2][3];
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 3; ++c) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += T[r][k] * p.sigma(k, c);
      TS[r][c] = s;
    }
  auto entry = [&](int r, int c) {
    double s = 0.0;
    for (int k = 0; k < 3; ++k) s += TS[r][k] * T[c][k];
    return s;
  };

  Gaussian2D out;
  out.mean = {cam.fx * pc.x / pc.z + cam.cx, cam.fy * pc.y / pc.z + cam.cy};
  out.cov = {entry(0, 0), 0.5 * (entry(0, 1) + entry(1, 0)), entry(1, 1)};
  out.opacity = sigmoid(g.opacity_logit);
  out.color = g.color;
  out.depth = pc.z;
  return out;
}

Camera scale_camera(const Camera& cam, ScaleSet s) {
  if (s.factor < 1) throw DomainError("scale factor must be >= 1");
  if (s.factor == 1) return cam;
  Camera out = cam;
  const double f = static_cast<double>(s.factor);
  out.width = std::max(1, cam.width / s.factor);
  out.height = std::max(1, cam.height / s.factor);
  // Floor division shrinks the sensor; keep the principal point at the same
  // relative position and scale the focal length with the image.
  const double sx = static_cast<double>(out.width) / cam.width;
  const double sy = static_cast<double>(out.height) / cam.height;
  if (cam.width % s.factor == 0 && cam.height % s.factor == 0) {
    out.fx = cam.fx / f;
    out.fy = cam.fy / f;
    out.cx = cam.cx / f;
    out.cy = cam.cy / f;
  } else {
    out.fx = cam.fx * sx;
    out.fy = cam.fy * sy;
    out.cx = cam.cx * sx;
    out.cy = cam.cy * sy;
  }
  return out;
}

Gaussian3DGrad project_backward(const Gaussian3D& g, const Camera& cam, const GaussGrad& grad2d) {
  Gaussian3DGrad out;
  out.d_color = grad2d.d_color;
  const double alpha = sigmoid(g.opacity_logit);
  out.d_opacity_logit = grad2d.d_opacity * alpha * (1.0 - alpha);

  const Projection p = prepare(g, cam);
  const double x = p.p_cam.x, y = p.p_cam.y, z = p.p_cam.z;

  // Mean: u = fx x/z + cx, v = fy y/z + cy.
  Vec3 d_pcam{cam.fx / z * grad2d.d_mean.x, cam.fy / z * grad2d.d_mean.y,
              -cam.fx * x / (z * z) * grad2d.d_mean.x - cam.fy * y / (z * z) * grad2d.d_mean.y};

  // Covariance: Sigma2 = T Sigma T^T with T = J W. G is the full symmetric
  // gradient (off-diagonal split over both slots).
  const double G[2][2] = {{grad2d.d_cov.s11, 0.5 * grad2d.d_cov.s12},
                          {0.5 * grad2d.d_cov.s12, grad2d.d_cov.s22}};
  double T[2][3];
  jw(p, T);

  // dL/dSigma = T^T G T.
  Mat3 d_sigma;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) {
      double s = 0.0;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) s += T[a][r] * G[a][b] * T[b][c];
      d_sigma(r, c) = s;
    }

  // dL/dT = 2 G T Sigma; dL/dJ = dL/dT W^T.
  double GT[2][3];
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 3; ++c) GT[r][c] = G[r][0] * T[0][c] + G[r][1] * T[1][c];
  double dT[2][3];
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 3; ++c) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += GT[r][k] * p.sigma(k, c);
      dT[r][c] = 2.0 * s;
    }
  double dJ[2][3];
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 3; ++c) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += dT[r][k] * p.W(c, k);
      dJ[r][c] = s;
    }

  const double z2 = z * z, z3 = z2 * z;
  d_pcam.x += dJ[0][2] * (-cam.fx / z2);
  d_pcam.y += dJ[1][2] * (-cam.fy / z2);
  d_pcam.z += dJ[0][0] * (-cam.fx / z2) + dJ[0][2] * (2.0 * cam.fx * x / z3) +
              dJ[1][1] * (-cam.fy / z2) + dJ[1][2] * (2.0 * cam.fy * y / z3);

  out.d_position = p.W.transposed() * d_pcam;

  // Sigma = M M^T with M = R S; dL/dM = 2 dSigma M (dSigma symmetric).
  const Quat qn = normalized(g.rotation);
  const Mat3 R = unit_quat_to_rotation(qn);
  const Vec3 s{std::exp(g.log_scales.x), std::exp(g.log_scales.y), std::exp(g.log_scales.z)};
  Mat3 M = R;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) M(r, c) *= s[c];
  const Mat3 dM = d_sigma * M * 2.0;

  // M(r, c) = R(r, c) s_c.
  Mat3 dR;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) dR(r, c) = dM(r, c) * s[c];
  for (int c = 0; c < 3; ++c) {
    double ds = 0.0;
    for (int r = 0; r < 3; ++r) ds += dM(r, c) * R(r, c);
    out.d_log_scales[c] = ds * s[c];
  }

  // Rotation matrix entries as functions of the unit quaternion.
  const double w = qn.w, qx = qn.x, qy = qn.y, qz = qn.z;
  Quat dq;
  dq.w = 2 * (-qz * dR(0, 1) + qy * dR(0, 2) + qz * dR(1, 0) - qx * dR(1, 2) - qy * dR(2, 0) +
              qx * dR(2, 1));
  dq.x = 2 * (qy * dR(0, 1) + qz * dR(0, 2) + qy * dR(1, 0) - 2 * qx * dR(1, 1) - w * dR(1, 2) +
              qz * dR(2, 0) + w * dR(2, 1) - 2 * qx * dR(2, 2));
  dq.y = 2 * (-2 * qy * dR(0, 0) + qx * dR(0, 1) + w * dR(0, 2) + qx * dR(1, 0) + qz * dR(1, 2) -
              w * dR(2, 0) + qz * dR(2, 1) - 2 * qy * dR(2, 2));
  dq.z = 2 * (-2 * qz * dR(0, 0) - w * dR(0, 1) + qx * dR(0, 2) + w * dR(1, 0) - 2 * qz * dR(1, 1) +
              qy * dR(1, 2) + qx * dR(2, 0) + qy * dR(2, 1));

  // Through q / |q|.
  const Quat& q = g.rotation;
  const double n = std::sqrt(q.w * q.w + q.x * q.x + q.y * q.y + q.z * q.z);
  const double proj = dq.w * qn.w + dq.x * qn.x + dq.y * qn.y + dq.z * qn.z;
  out.d_rotation = {(dq.w - qn.w * proj) / n, (dq.x - qn.x * proj) / n, (dq.y - qn.y * proj) / n,
                    (dq.z - qn.z * proj) / n};
  return out;
}

}  // namespace asplat

#include "asplat/metrics.hpp"

#include <array>
#include <cmath>
#include <limits>

#include "asplat/errors.hpp"

namespace asplat {

namespace {

constexpr int kWindow = 11;
constexpr int kHalf = kWindow / 2;
constexpr double kC1 = 0.01 * 0.01;
constexpr double kC2 = 0.03 * 0.03;

void require_same_size(const Image& a, const Image& b) {
  if (!a.same_size(b)) throw DomainError("images differ in size");
  if (a.data.empty()) throw DomainError("images are empty");
}

std::array<double, kWindow> gaussian_window() {
  std::array<double, kWindow> w{};
  double sum = 0.0;
  for (int i = 0; i < kWindow; ++i) {
    const double d = i - kHalf;
    w[i] = std::exp(-d * d / (2.0 * 1.5 * 1.5));
    sum += w[i];
  }
  for (double& v : w) v /= sum;
  return w;
}

// Single-channel plane.
struct Plane {
  int w = 0;
  int h = 0;
  std::vector<double> v;
  double& at(int x, int y) { return v[static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x)]; }
  double at(int x, int y) const { return v[static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x)]; }
};

Plane channel(const Image& img, int c) {
  Plane p{img.width, img.height, std::vector<double>(img.pixel_count())};
  for (std::size_t i = 0; i < p.v.size(); ++i) p.v[i] = img.data[3 * i + static_cast<std::size_t>(c)];
  return p;
}

// Separable "same" correlation with zero padding. The window is symmetric,
// so this operator is its own adjoint.
Plane blur(const Plane& in) {
  static const auto win = gaussian_window();
  Plane tmp{in.w, in.h, std::vector<double>(in.v.size())};
  for (int y = 0; y < in.h; ++y)
    for (int x = 0; x < in.w; ++x) {
      double s = 0.0;
      for (int k = -kHalf; k <= kHalf; ++k) {
        const int xx = x + k;
        if (xx >= 0 && xx < in.w) s += win[k + kHalf] * in.at(xx, y);
      }
      tmp.at(x, y) = s;
    }
  Plane out{in.w, in.h, std::vector<double>(in.v.size())};
  for (int y = 0; y < in.h; ++y)
    for (int x = 0; x < in.w; ++x) {
      double s = 0.0;
      for (int k = -kHalf; k <= kHalf; ++k) {
        const int yy = y + k;
        if (yy >= 0 && yy < in.h) s += win[k + kHalf] * tmp.at(x, yy);
      }
      out.at(x, y) = s;
    }
  return out;
}

Plane product(const Plane& a, const Plane& b) {
  Plane p{a.w, a.h, std::vector<double>(a.v.size())};
  for (std::size_t i = 0; i < p.v.size(); ++i) p.v[i] = a.v[i] * b.v[i];
  return p;
}

}  // namespace

double mse(const Image& a, const Image& b) {
  require_same_size(a, b);
  double sum = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    const double d = a.data[i] - b.data[i];
    sum += d * d;
  }
  return sum / static_cast<double>(a.data.size());
}

double psnr(const Image& a, const Image& b) {
  const double m = mse(a, b);
  if (m == 0.0) return std::numeric_limits<double>::infinity();
  return -10.0 * std::log10(m);
}

double l1(const Image& a, const Image& b) {
  require_same_size(a, b);
  double sum = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) sum += std::abs(a.data[i] - b.data[i]);
  return sum / static_cast<double>(a.data.size());
}

double ssim_with_grad(const Image& a, const Image& b, Image* d_a) {
  require_same_size(a, b);
  if (a.width < kWindow || a.height < kWindow) throw DomainError("SSIM needs images of at least 11x11 pixels");
  if (d_a) *d_a = Image(a.width, a.height);

  const double n = static_cast<double>(a.data.size());
  double total = 0.0;
  for (int c = 0; c < 3; ++c) {
    const Plane x = channel(a, c);
    const Plane y = channel(b, c);
    const Plane mx = blur(x);
    const Plane my = blur(y);
    const Plane exx = blur(product(x, x));
    const Plane eyy = blur(product(y, y));
    const Plane exy = blur(product(x, y));

    Plane ga{x.w, x.h, std::vector<double>(x.v.size())};  // coefficient on 1
    Plane gb{x.w, x.h, std::vector<double>(x.v.size())};  // coefficient on 2x
    Plane gc{x.w, x.h, std::vector<double>(x.v.size())};  // coefficient on y
    for (std::size_t i = 0; i < x.v.size(); ++i) {
      const double ux = mx.v[i];
      const double uy = my.v[i];
      const double sxx = exx.v[i] - ux * ux;
      const double syy = eyy.v[i] - uy * uy;
      const double sxy = exy.v[i] - ux * uy;
      const double l1n = 2.0 * ux * uy + kC1;
      const double l1d = ux * ux + uy * uy + kC1;
      const double c2n = 2.0 * sxy + kC2;
      const double c2d = sxx + syy + kC2;
      const double s = (l1n * c2n) / (l1d * c2d);
      total += s;
      if (d_a) {
        const double ds_dux = 2.0 * uy * c2n / (l1d * c2d) - s * 2.0 * ux / l1d;
        const double ds_dsxx = -s / c2d;
        const double ds_dsxy = 2.0 * l1n / (l1d * c2d);
        ga.v[i] = (ds_dux - 2.0 * ux * ds_dsxx - uy * ds_dsxy) / n;
        gb.v[i] = ds_dsxx / n;
        gc.v[i] = ds_dsxy / n;
      }
    }
    if (d_a) {
      const Plane ba = blur(ga);
      const Plane bb = blur(gb);
      const Plane bc = blur(gc);
      for (std::size_t i = 0; i < x.v.size(); ++i)
        d_a->data[3 * i + static_cast<std::size_t>(c)] = ba.v[i] + 2.0 * x.v[i] * bb.v[i] + y.v[i] * bc.v[i];
    }
  }
  return total / n;
}

double ssim(const Image& a, const Image& b) { return ssim_with_grad(a, b, nullptr); }

PhotometricLoss photometric_loss(const Image& rendered, const Image& target, double lambda_dssim) {
  require_same_size(rendered, target);
  const double n = static_cast<double>(rendered.data.size());
  const bool use_ssim = lambda_dssim > 0.0 && rendered.width >= kWindow && rendered.height >= kWindow;
  const double w_l1 = use_ssim ? 1.0 - lambda_dssim : 1.0;

  PhotometricLoss out;
  out.d_rendered = Image(rendered.width, rendered.height);
  double sum = 0.0;
  for (std::size_t i = 0; i < rendered.data.size(); ++i) {
    const double d = rendered.data[i] - target.data[i];
    sum += std::abs(d);
    out.d_rendered.data[i] = w_l1 * (d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0)) / n;
  }
  out.value = w_l1 * sum / n;
  if (use_ssim) {
    Image d_ssim;
    const double s = ssim_with_grad(rendered, target, &d_ssim);
    out.value += lambda_dssim * (1.0 - s);
    for (std::size_t i = 0; i < out.d_rendered.data.size(); ++i) out.d_rendered.data[i] -= lambda_dssim * d_ssim.data[i];
  }
  return out;
}

}  // namespace asplat

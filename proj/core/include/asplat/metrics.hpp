#pragma once

// Image comparison metrics and the photometric training loss.

#include "asplat/image.hpp"

namespace asplat {

/// Mean squared error over all pixels and channels.
double mse(const Image& a, const Image& b);

/// 10 log10(1 / MSE) in dB. Identical images give +infinity.
double psnr(const Image& a, const Image& b);

/// Mean SSIM: 11x11 Gaussian window (sigma 1.5), K1 = 0.01, K2 = 0.03,
/// dynamic range 1, zero padding at the borders, averaged over pixels and
/// channels. Both sides must be at least 11 pixels.
double ssim(const Image& a, const Image& b);

/// ssim(a, b) and, when d_a is non-null, its gradient with respect to a.
double ssim_with_grad(const Image& a, const Image& b, Image* d_a);

/// Mean absolute difference over all pixels and channels.
double l1(const Image& a, const Image& b);

/// (1 - lambda) * L1 + lambda * (1 - SSIM) together with dLoss/dRendered.
/// Images smaller than the SSIM window fall back to plain L1.
struct PhotometricLoss {
  double value = 0.0;
  Image d_rendered;
};
PhotometricLoss photometric_loss(const Image& rendered, const Image& target, double lambda_dssim);

}  // namespace asplat

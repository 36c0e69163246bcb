#pragma once

#include <filesystem>
#include <vector>

#include "asplat/vec.hpp"

namespace asplat {

/// Row-major linear RGB image, channels interleaved, doubles in [0, 1].
struct Image {
  int width = 0;
  int height = 0;
  std::vector<double> data;

  Image() = default;
  Image(int w, int h, const Rgb& fill = {});

  std::size_t index(int x, int y) const {
    return 3 * (static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x));
  }
  Rgb at(int x, int y) const {
    const std::size_t i = index(x, y);
    return {data[i], data[i + 1], data[i + 2]};
  }
  void set(int x, int y, const Rgb& c) {
    const std::size_t i = index(x, y);
    data[i] = c.r;
    data[i + 1] = c.g;
    data[i + 2] = c.b;
  }
  std::size_t pixel_count() const { return static_cast<std::size_t>(width) * static_cast<std::size_t>(height); }
  bool same_size(const Image& o) const { return width == o.width && height == o.height; }
};

double srgb_encode(double linear);
double srgb_decode(double encoded);

/// Binary PPM (P6, maxval 255). With srgb the linear values are encoded with
/// the sRGB transfer curve before quantization (and decoded on read).
void write_ppm(const std::filesystem::path& path, const Image& img, bool srgb = false);
Image read_ppm(const std::filesystem::path& path, bool srgb = false);

/// Colour PFM: 32-bit little-endian floats, rows stored bottom-to-top.
void write_pfm(const std::filesystem::path& path, const Image& img);
Image read_pfm(const std::filesystem::path& path);

/// Reads .ppm or .pfm by extension.
Image read_image(const std::filesystem::path& path, bool srgb = false);

/// Mean over non-overlapping factor x factor blocks (floor-sized output).
Image box_downsample(const Image& img, int factor);

/// Antialiased bicubic resampling by an integer factor: Catmull-Rom kernel
/// (a = -0.5) stretched by the factor; taps falling outside the image are
/// dropped and the remaining weights renormalized.
Image bicubic_downsample(const Image& img, int factor);

}  // namespace asplat

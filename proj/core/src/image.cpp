#include "asplat/image.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "asplat/errors.hpp"

namespace asplat {

Image::Image(int w, int h, const Rgb& fill) : width(w), height(h) {
  if (w < 0 || h < 0) throw DomainError("image dimensions must be non-negative");
  data.resize(3 * static_cast<std::size_t>(w) * static_cast<std::size_t>(h));
  for (std::size_t i = 0; i < data.size(); i += 3) {
    data[i] = fill.r;
    data[i + 1] = fill.g;
    data[i + 2] = fill.b;
  }
}

double srgb_encode(double v) {
  v = std::clamp(v, 0.0, 1.0);
  return v <= 0.0031308 ? 12.92 * v : 1.055 * std::pow(v, 1.0 / 2.4) - 0.055;
}

double srgb_decode(double v) {
  v = std::clamp(v, 0.0, 1.0);
  return v <= 0.04045 ? v / 12.92 : std::pow((v + 0.055) / 1.055, 2.4);
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return in;
}

// Reads the next whitespace-separated header token, skipping '#' comments.
std::string header_token(std::istream& in, const std::filesystem::path& path) {
  std::string tok;
  for (;;) {
    int c = in.get();
    if (c == EOF) throw ParseError("truncated header in '" + path.string() + "'");
    if (c == '#') {
      std::string dummy;
      std::getline(in, dummy);
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) return tok;
      continue;
    }
    tok.push_back(static_cast<char>(c));
  }
}

int parse_dim(const std::string& tok, const char* field, const std::filesystem::path& path) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(tok, &used);
    if (used != tok.size() || v <= 0) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw ParseError(std::string("invalid ") + field + " '" + tok + "' in '" + path.string() + "'");
  }
}

}  // namespace

void write_ppm(const std::filesystem::path& path, const Image& img, bool srgb) {
  auto out = open_out(path);
  out << "P6\n" << img.width << ' ' << img.height << "\n255\n";
  std::vector<unsigned char> bytes(img.data.size());
  for (std::size_t i = 0; i < img.data.size(); ++i) {
    const double v = srgb ? srgb_encode(img.data[i]) : std::clamp(img.data[i], 0.0, 1.0);
    bytes[i] = static_cast<unsigned char>(std::lround(v * 255.0));
  }
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

Image read_ppm(const std::filesystem::path& path, bool srgb) {
  auto in = open_in(path);
  if (header_token(in, path) != "P6") throw ParseError("'" + path.string() + "' is not a binary PPM (P6)");
  const int w = parse_dim(header_token(in, path), "width", path);
  const int h = parse_dim(header_token(in, path), "height", path);
  const int maxval = parse_dim(header_token(in, path), "maxval", path);
  if (maxval != 255) throw ParseError("only 8-bit PPM (maxval 255) is supported: '" + path.string() + "'");
  Image img(w, h);
  std::vector<unsigned char> bytes(img.data.size());
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (in.gcount() != static_cast<std::streamsize>(bytes.size()))
    throw ParseError("truncated pixel data in '" + path.string() + "'");
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    const double v = bytes[i] / 255.0;
    img.data[i] = srgb ? srgb_decode(v) : v;
  }
  return img;
}

void write_pfm(const std::filesystem::path& path, const Image& img) {
  static_assert(sizeof(float) == 4);
  auto out = open_out(path);
  out << "PF\n" << img.width << ' ' << img.height << "\n-1.0\n";
  std::vector<unsigned char> row(12 * static_cast<std::size_t>(img.width));
  for (int y = img.height - 1; y >= 0; --y) {
    for (int x = 0; x < img.width; ++x) {
      const Rgb c = img.at(x, y);
      for (int ch = 0; ch < 3; ++ch) {
        auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(c[ch]));
        unsigned char* p = row.data() + 12 * x + 4 * ch;
        for (int b = 0; b < 4; ++b) p[b] = static_cast<unsigned char>((bits >> (8 * b)) & 0xFF);
      }
    }
    out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
  }
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

Image read_pfm(const std::filesystem::path& path) {
  auto in = open_in(path);
  if (header_token(in, path) != "PF") throw ParseError("'" + path.string() + "' is not a colour PFM (PF)");
  const int w = parse_dim(header_token(in, path), "width", path);
  const int h = parse_dim(header_token(in, path), "height", path);
  const std::string scale_tok = header_token(in, path);
  double scale = 0.0;
  try {
    scale = std::stod(scale_tok);
  } catch (const std::exception&) {
    throw ParseError("invalid scale '" + scale_tok + "' in '" + path.string() + "'");
  }
  if (scale == 0.0) throw ParseError("invalid scale '" + scale_tok + "' in '" + path.string() + "'");
  const bool little = scale < 0.0;
  Image img(w, h);
  std::vector<unsigned char> row(12 * static_cast<std::size_t>(w));
  for (int y = h - 1; y >= 0; --y) {
    in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(row.size()));
    if (in.gcount() != static_cast<std::streamsize>(row.size()))
      throw ParseError("truncated pixel data in '" + path.string() + "'");
    for (int x = 0; x < w; ++x) {
      Rgb c;
      for (int ch = 0; ch < 3; ++ch) {
        const unsigned char* p = row.data() + 12 * x + 4 * ch;
        std::uint32_t bits = 0;
        for (int b = 0; b < 4; ++b) {
          const int shift = little ? 8 * b : 8 * (3 - b);
          bits |= static_cast<std::uint32_t>(p[b]) << shift;
        }
        c[ch] = std::bit_cast<float>(bits);
      }
      img.set(x, y, c);
    }
  }
  return img;
}

Image read_image(const std::filesystem::path& path, bool srgb) {
  const auto ext = path.extension().string();
  if (ext == ".pfm" || ext == ".PFM") return read_pfm(path);
  return read_ppm(path, srgb);
}

Image box_downsample(const Image& img, int factor) {
  if (factor < 1) throw DomainError("downsampling factor must be >= 1");
  if (factor == 1) return img;
  Image out(img.width / factor, img.height / factor);
  const double inv = 1.0 / (factor * factor);
  for (int y = 0; y < out.height; ++y)
    for (int x = 0; x < out.width; ++x) {
      Rgb sum;
      for (int j = 0; j < factor; ++j)
        for (int i = 0; i < factor; ++i) sum += img.at(x * factor + i, y * factor + j);
      out.set(x, y, sum * inv);
    }
  return out;
}

namespace {

double catmull_rom(double t) {
  constexpr double a = -0.5;
  t = std::abs(t);
  if (t <= 1.0) return ((a + 2.0) * t - (a + 3.0)) * t * t + 1.0;
  if (t < 2.0) return ((a * t - 5.0 * a) * t + 8.0 * a) * t - 4.0 * a;
  return 0.0;
}

struct Taps {
  int first = 0;
  std::vector<double> weights;
};

// Separable resampling weights from `in` samples to `out` samples.
std::vector<Taps> resample_taps(int in, int out, int factor) {
  std::vector<Taps> taps(static_cast<std::size_t>(out));
  const double support = 2.0 * factor;
  for (int o = 0; o < out; ++o) {
    const double centre = (o + 0.5) * factor;  // continuous input coordinate
    // Taps outside the image are dropped and the rest renormalized.
    const int lo = std::max(0, static_cast<int>(std::floor(centre - support)));
    const int hi = std::min(in - 1, static_cast<int>(std::ceil(centre + support)));
    Taps& t = taps[static_cast<std::size_t>(o)];
    t.first = lo;
    double sum = 0.0;
    for (int i = lo; i <= hi; ++i) {
      const double w = catmull_rom((i + 0.5 - centre) / factor);
      t.weights.push_back(w);
      sum += w;
    }
    for (double& w : t.weights) w /= sum;
  }
  return taps;
}

}  // namespace

Image bicubic_downsample(const Image& img, int factor) {
  if (factor < 1) throw DomainError("downsampling factor must be >= 1");
  if (factor == 1) return img;
  const int ow = std::max(1, img.width / factor);
  const int oh = std::max(1, img.height / factor);
  const auto tx = resample_taps(img.width, ow, factor);
  const auto ty = resample_taps(img.height, oh, factor);

  Image horiz(ow, img.height);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < ow; ++x) {
      const Taps& t = tx[static_cast<std::size_t>(x)];
      Rgb sum;
      for (std::size_t k = 0; k < t.weights.size(); ++k) {
        sum += img.at(t.first + static_cast<int>(k), y) * t.weights[k];
      }
      horiz.set(x, y, sum);
    }
  Image out(ow, oh);
  for (int y = 0; y < oh; ++y) {
    const Taps& t = ty[static_cast<std::size_t>(y)];
    for (int x = 0; x < ow; ++x) {
      Rgb sum;
      for (std::size_t k = 0; k < t.weights.size(); ++k) {
        sum += horiz.at(x, t.first + static_cast<int>(k)) * t.weights[k];
      }
      out.set(x, y, sum);
    }
  }
  return out;
}

}  // namespace asplat

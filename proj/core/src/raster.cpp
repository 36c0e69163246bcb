#include "asplat/raster.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "asplat/errors.hpp"
#include "asplat/parallel.hpp"

namespace asplat {

double splat_radius(const SymMat2& cov) {
  const double diff = cov.s11 - cov.s22;
  const double lambda1 = 0.5 * (cov.trace() + std::sqrt(diff * diff + 4.0 * cov.s12 * cov.s12));
  return 3.0 * std::sqrt(std::max(lambda1, 0.0));
}

namespace {

std::uint64_t position_key(const Vec2& m) {
  auto mix = [](std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  };
  return mix(std::bit_cast<std::uint64_t>(m.x) ^ mix(std::bit_cast<std::uint64_t>(m.y)));
}

}  // namespace

TileList build_tiles(std::span<const Gaussian2D> splats, int width, int height, int tile_size,
                     TieBreak tie_break) {
  if (tile_size < 1) throw DomainError("tile size must be positive");
  TileList list;
  list.tile_size = tile_size;
  list.tiles_x = (width + tile_size - 1) / tile_size;
  list.tiles_y = (height + tile_size - 1) / tile_size;
  list.tiles.resize(static_cast<std::size_t>(list.tiles_x) * static_cast<std::size_t>(list.tiles_y));
  if (splats.empty()) return list;

  std::vector<std::uint32_t> order(splats.size());
  std::iota(order.begin(), order.end(), 0u);
  if (tie_break == TieBreak::InputIndex) {
    std::stable_sort(order.begin(), order.end(),
                     [&](std::uint32_t a, std::uint32_t b) { return splats[a].depth < splats[b].depth; });
  } else {
    std::vector<std::uint64_t> keys(splats.size());
    for (std::size_t i = 0; i < splats.size(); ++i) keys[i] = position_key(splats[i].mean);
    std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
      if (splats[a].depth != splats[b].depth) return splats[a].depth < splats[b].depth;
      return keys[a] < keys[b];
    });
  }

  const double ts = tile_size;
  for (std::uint32_t idx : order) {
    const Gaussian2D& g = splats[idx];
    const double r = splat_radius(g.cov);
    if (!std::isfinite(r) || !std::isfinite(g.mean.x) || !std::isfinite(g.mean.y)) continue;
    if (g.mean.x + r < 0.0 || g.mean.y + r < 0.0 || g.mean.x - r >= width || g.mean.y - r >= height) continue;
    const int x0 = std::max(0, static_cast<int>(std::floor((g.mean.x - r) / ts)));
    const int x1 = std::min(list.tiles_x - 1, static_cast<int>(std::floor((g.mean.x + r) / ts)));
    const int y0 = std::max(0, static_cast<int>(std::floor((g.mean.y - r) / ts)));
    const int y1 = std::min(list.tiles_y - 1, static_cast<int>(std::floor((g.mean.y + r) / ts)));
    for (int ty = y0; ty <= y1; ++ty)
      for (int tx = x0; tx <= x1; ++tx)
        list.tiles[static_cast<std::size_t>(ty) * static_cast<std::size_t>(list.tiles_x) + static_cast<std::size_t>(tx)]
            .push_back(idx);
  }
  return list;
}

SymMat2 clamp_eigenvalues(const SymMat2& cov, double lo, double hi) {
  const EigenDecomp2 e = eigendecompose(cov);
  if (e.lambda1 <= hi && e.lambda2 >= lo) return cov;
  EigenDecomp2 c = e;
  c.lambda1 = std::clamp(e.lambda1, lo, hi);
  c.lambda2 = std::clamp(e.lambda2, lo, hi);
  return reconstruct(c);
}

SymMat2 clamp_eigenvalues_backward(const SymMat2& cov, double lo, double hi, const SymMat2& d_clamped) {
  const EigenDecomp2 e = eigendecompose(cov);
  if (e.lambda1 <= hi && e.lambda2 >= lo) return d_clamped;

  // Daleckii-Krein: dF = V (F o V^T dS V) V^T for a spectral function f.
  auto f = [&](double l) { return std::clamp(l, lo, hi); };
  auto fprime = [&](double l) { return (l >= lo && l <= hi) ? 1.0 : 0.0; };
  const double gap = e.lambda1 - e.lambda2;
  const double f11 = fprime(e.lambda1);
  const double f22 = fprime(e.lambda2);
  const double f12 = gap > 1e-12 * std::max(e.lambda1, 1.0) ? (f(e.lambda1) - f(e.lambda2)) / gap : 0.5 * (f11 + f22);

  const double G[2][2] = {{d_clamped.s11, 0.5 * d_clamped.s12}, {0.5 * d_clamped.s12, d_clamped.s22}};
  const Vec2 v[2] = {e.v1, e.v2};
  auto vgv = [&](const Vec2& a, const Vec2& b) {
    return a.x * (G[0][0] * b.x + G[0][1] * b.y) + a.y * (G[1][0] * b.x + G[1][1] * b.y);
  };
  const double F[2][2] = {{f11, f12}, {f12, f22}};
  double M[2][2] = {{0, 0}, {0, 0}};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const double w = F[i][j] * vgv(v[i], v[j]);
      M[0][0] += w * v[i].x * v[j].x;
      M[0][1] += w * v[i].x * v[j].y;
      M[1][0] += w * v[i].y * v[j].x;
      M[1][1] += w * v[i].y * v[j].y;
    }
  return {M[0][0], M[0][1] + M[1][0], M[1][1]};
}

struct PreparedSplat {
  Vec2 mean;
  double opacity = 0.0;
  Rgb color;
  SymMat2 input_cov;
  SymMat2 clamped_cov;
  bool clamp_active = false;
  EigenDecomp2 frame;
  Conic2 conic;
  double amplitude = 1.0;
  double sigma1 = 0.0;
  double sigma2 = 0.0;
  double peak2 = 0.0;  // sigma2 * window_integral_1d(0, sigma2): bound on the minor-axis factor
};

struct RenderState {
  RasterConfig cfg;
  int width = 0;
  int height = 0;
  std::size_t input_count = 0;
  std::vector<PreparedSplat> splats;
  std::vector<std::size_t> input_index;
  TileList tiles;
  std::vector<int> last_contributor;  // per pixel, index into the pixel's tile list
};

namespace {

bool finite(const Gaussian2D& g) {
  return std::isfinite(g.mean.x) && std::isfinite(g.mean.y) && std::isfinite(g.cov.s11) &&
         std::isfinite(g.cov.s12) && std::isfinite(g.cov.s22) && std::isfinite(g.opacity) &&
         std::isfinite(g.depth);
}

std::optional<PreparedSplat> prepare_splat(const Gaussian2D& g, const RasterConfig& cfg) {
  if (!finite(g)) return std::nullopt;
  PreparedSplat s;
  s.mean = g.mean;
  s.opacity = g.opacity;
  s.color = g.color;
  s.input_cov = g.cov;
  try {
    s.clamped_cov = clamp_eigenvalues(g.cov, cfg.min_eigenvalue, cfg.max_eigenvalue);
  } catch (const DomainError&) {
    return std::nullopt;
  }
  s.clamp_active = !(s.clamped_cov == g.cov);

  switch (cfg.scheme.kind) {
    case ShadeScheme::Kind::Analytic: {
      s.frame = eigendecompose(s.clamped_cov);
      s.sigma1 = std::sqrt(s.frame.lambda1);
      s.sigma2 = std::sqrt(s.frame.lambda2);
      s.peak2 = s.sigma2 * window_integral_1d(0.0, s.sigma2);
      break;
    }
    case ShadeScheme::Kind::CenterSample: {
      const SymMat2 dilated{s.clamped_cov.s11 + cfg.center_dilation, s.clamped_cov.s12,
                            s.clamped_cov.s22 + cfg.center_dilation};
      s.conic = conic_from_cov(dilated);
      break;
    }
    case ShadeScheme::Kind::SuperSample:
      s.conic = conic_from_cov(s.clamped_cov);
      break;
    case ShadeScheme::Kind::Prefilter: {
      const double w2 = cfg.scheme.sigma_w * cfg.scheme.sigma_w;
      const SymMat2 filtered{s.clamped_cov.s11 + w2, s.clamped_cov.s12, s.clamped_cov.s22 + w2};
      s.conic = conic_from_cov(filtered);
      s.amplitude = std::sqrt(s.clamped_cov.det() / filtered.det());
      break;
    }
  }
  return s;
}

// Covariance actually used for shading, for binning.
SymMat2 shading_cov(const PreparedSplat& s, const RasterConfig& cfg) {
  switch (cfg.scheme.kind) {
    case ShadeScheme::Kind::CenterSample:
      return {s.clamped_cov.s11 + cfg.center_dilation, s.clamped_cov.s12, s.clamped_cov.s22 + cfg.center_dilation};
    case ShadeScheme::Kind::Prefilter: {
      const double w2 = cfg.scheme.sigma_w * cfg.scheme.sigma_w;
      return {s.clamped_cov.s11 + w2, s.clamped_cov.s12, s.clamped_cov.s22 + w2};
    }
    default:
      return s.clamped_cov;
  }
}

double splat_response(const PreparedSplat& s, Vec2 pixel, const RasterConfig& cfg) {
  const Vec2 d = pixel - s.mean;
  switch (cfg.scheme.kind) {
    case ShadeScheme::Kind::Analytic: {
      // opacity * I <= opacity * 2 pi I_1 * peak2; when that is already below
      // the blend threshold the term is skipped anyway.
      const double ux = dot(s.frame.v1, d);
      const double i1 = s.sigma1 * window_integral_1d(ux, s.sigma1);
      constexpr double two_pi = 6.283185307179586;
      if (s.opacity * two_pi * i1 * s.peak2 < cfg.blend.min_alpha) return 0.0;
      return analytic_response(s.frame, d, false).response;
    }
    case ShadeScheme::Kind::CenterSample:
      return center_response(s.conic, d);
    case ShadeScheme::Kind::SuperSample: {
      const int n = cfg.scheme.samples;
      double sum = 0.0;
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
          sum += center_response(s.conic, {d.x + (i + 0.5) / n - 0.5, d.y + (j + 0.5) / n - 0.5});
      return sum / (n * n);
    }
    case ShadeScheme::Kind::Prefilter:
      return s.amplitude * center_response(s.conic, d);
  }
  return 0.0;
}

ShadeResult splat_response_grad(const PreparedSplat& s, Vec2 pixel, const RasterConfig& cfg) {
  const Vec2 d = pixel - s.mean;
  ShadeResult r;
  if (cfg.scheme.kind == ShadeScheme::Kind::Analytic) {
    r = analytic_response(s.frame, d, true);
  } else {
    center_response(s.conic, d, &r);
  }
  return r;
}

Vec2 pixel_centre(int x, int y) { return {x + 0.5, y + 0.5}; }

}  // namespace

RasterOutput rasterize(std::span<const Gaussian2D> splats, int width, int height, const RasterConfig& cfg) {
  if (width < 1 || height < 1) throw DomainError("render resolution must be at least 1x1");
  auto state = std::make_shared<RenderState>();
  state->cfg = cfg;
  state->width = width;
  state->height = height;
  state->input_count = splats.size();

  std::vector<Gaussian2D> binned;
  for (std::size_t i = 0; i < splats.size(); ++i) {
    auto p = prepare_splat(splats[i], cfg);
    if (!p) continue;
    Gaussian2D b = splats[i];
    b.cov = shading_cov(*p, cfg);
    binned.push_back(b);
    state->splats.push_back(*p);
    state->input_index.push_back(i);
  }
  state->tiles = build_tiles(binned, width, height, cfg.tile_size, cfg.tie_break);

  RasterOutput out;
  out.image = Image(width, height);
  BlendRecord& rec = out.record;
  rec.width = width;
  rec.height = height;
  rec.background = cfg.background;
  rec.final_transmittance.assign(out.image.pixel_count(), 1.0);
  rec.contributors.assign(out.image.pixel_count(), 0);
  state->last_contributor.assign(out.image.pixel_count(), -1);

  const TileList& tiles = state->tiles;
  const int ts = tiles.tile_size;
  parallel_for(tiles.tiles.size(), [&](std::size_t t) {
    const int tx = static_cast<int>(t % static_cast<std::size_t>(tiles.tiles_x));
    const int ty = static_cast<int>(t / static_cast<std::size_t>(tiles.tiles_x));
    const auto& list = tiles.tiles[t];
    for (int y = ty * ts; y < std::min(height, (ty + 1) * ts); ++y)
      for (int x = tx * ts; x < std::min(width, (tx + 1) * ts); ++x) {
        const Vec2 pc = pixel_centre(x, y);
        auto term = [&](int k) {
          const PreparedSplat& s = state->splats[list[static_cast<std::size_t>(k)]];
          return BlendTerm{s.opacity * splat_response(s, pc, cfg), s.color};
        };
        const BlendForward f = blend_forward(static_cast<int>(list.size()), term, cfg.background, cfg.blend);
        const std::size_t p = static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x);
        out.image.set(x, y, f.color);
        rec.final_transmittance[p] = f.final_transmittance;
        rec.contributors[p] = f.contributors;
        state->last_contributor[p] = f.last_contributor;
      }
  });
  rec.state = std::move(state);
  return out;
}

std::vector<GaussGrad> rasterize_backward(const BlendRecord& record, const Image& d_image) {
  if (!record.state) throw DomainError("blend record carries no forward state");
  const RenderState& st = *record.state;
  const RasterConfig& cfg = st.cfg;
  if (!cfg.scheme.differentiable())
    throw UnsupportedOperation("no backward pass for shading scheme '" + cfg.scheme.label() + "'");
  if (d_image.width != st.width || d_image.height != st.height)
    throw DomainError("upstream gradient image size does not match the render");

  const TileList& tiles = st.tiles;
  const int ts = tiles.tile_size;
  std::vector<std::vector<GaussGrad>> partial(tiles.tiles.size());

  parallel_for(tiles.tiles.size(), [&](std::size_t t) {
    const auto& list = tiles.tiles[t];
    auto& acc = partial[t];
    acc.assign(list.size(), GaussGrad{});
    if (list.empty()) return;
    const int tx = static_cast<int>(t % static_cast<std::size_t>(tiles.tiles_x));
    const int ty = static_cast<int>(t / static_cast<std::size_t>(tiles.tiles_x));
    for (int y = ty * ts; y < std::min(st.height, (ty + 1) * ts); ++y)
      for (int x = tx * ts; x < std::min(st.width, (tx + 1) * ts); ++x) {
        const Rgb upstream = d_image.at(x, y);
        if (upstream == Rgb{}) continue;
        const std::size_t p = static_cast<std::size_t>(y) * static_cast<std::size_t>(st.width) + static_cast<std::size_t>(x);
        BlendForward fwd;
        fwd.final_transmittance = record.final_transmittance[p];
        fwd.last_contributor = st.last_contributor[p];
        const Vec2 pc = pixel_centre(x, y);

        int cached_k = -1;
        ShadeResult cached;
        auto term = [&](int k) {
          const PreparedSplat& s = st.splats[list[static_cast<std::size_t>(k)]];
          cached = splat_response_grad(s, pc, cfg);
          cached_k = k;
          return BlendTerm{s.opacity * cached.response, s.color};
        };
        blend_backward(
            fwd, term, record.background, upstream,
            [&](int k, double d_alpha_response, const Rgb& d_color) {
              const PreparedSplat& s = st.splats[list[static_cast<std::size_t>(k)]];
              if (cached_k != k) cached = splat_response_grad(s, pc, cfg);
              GaussGrad& g = acc[static_cast<std::size_t>(k)];
              g.d_color += d_color;
              g.d_opacity += d_alpha_response * cached.response;
              const double d_response = d_alpha_response * s.opacity;
              g.d_mean += cached.d_mean * d_response;
              g.d_cov += cached.d_cov * d_response;
            },
            cfg.blend);
      }
  });

  std::vector<GaussGrad> prepared_grads(st.splats.size());
  for (std::size_t t = 0; t < tiles.tiles.size(); ++t) {
    const auto& list = tiles.tiles[t];
    for (std::size_t k = 0; k < list.size(); ++k) prepared_grads[list[k]] += partial[t][k];
  }

  std::vector<GaussGrad> out(st.input_count);
  for (std::size_t i = 0; i < st.splats.size(); ++i) {
    const PreparedSplat& s = st.splats[i];
    GaussGrad g = prepared_grads[i];
    // Dilation and prefilter shifts have unit Jacobian; only the clamp remains.
    if (s.clamp_active)
      g.d_cov = clamp_eigenvalues_backward(s.input_cov, cfg.min_eigenvalue, cfg.max_eigenvalue, g.d_cov);
    out[st.input_index[i]] = g;
  }
  return out;
}

SceneRender render(std::span<const Gaussian3D> gaussians, const Camera& cam, const RasterConfig& cfg) {
  SceneRender r;
  for (std::size_t i = 0; i < gaussians.size(); ++i) {
    auto g2 = project_gaussian(gaussians[i], cam);
    if (!g2) continue;
    r.splats.push_back(*g2);
    r.source.push_back(i);
  }
  RasterOutput out = rasterize(r.splats, cam.width, cam.height, cfg);
  r.image = std::move(out.image);
  r.record = std::move(out.record);
  return r;
}

std::vector<GaussGrad> render_backward(const SceneRender& r, const Image& d_image) {
  return rasterize_backward(r.record, d_image);
}

std::vector<Gaussian3DGrad> render_backward_3d(const SceneRender& r, std::span<const Gaussian3D> gaussians,
                                               const Camera& cam, const Image& d_image) {
  const std::vector<GaussGrad> g2 = render_backward(r, d_image);
  std::vector<Gaussian3DGrad> out(gaussians.size());
  for (std::size_t i = 0; i < g2.size(); ++i) {
    const std::size_t src = r.source[i];
    out[src] = project_backward(gaussians[src], cam, g2[i]);
  }
  return out;
}

}  // namespace asplat

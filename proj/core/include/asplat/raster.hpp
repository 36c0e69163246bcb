#pragma once

// Tile-based rasterizer: per-splat covariance conditioning, depth-sorted
// 16x16 tile lists, front-to-back compositing, and the matching backward.
//
// Results are deterministic for any ASPLAT_THREADS: tiles are rendered
// independently and backward partial sums are reduced in tile index order.

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "asplat/blend.hpp"
#include "asplat/gradients.hpp"
#include "asplat/image.hpp"
#include "asplat/project.hpp"
#include "asplat/shading.hpp"

namespace asplat {

enum class TieBreak {
  InputIndex,    // stable sort on (depth, input index)
  PositionHash,  // (depth, hash of the mean): independent of input order
};

struct TileList {
  int tile_size = 16;
  int tiles_x = 0;
  int tiles_y = 0;
  std::vector<std::vector<std::uint32_t>> tiles;  // row-major tiles, indices sorted front to back

  const std::vector<std::uint32_t>& at(int tx, int ty) const {
    return tiles[static_cast<std::size_t>(ty) * static_cast<std::size_t>(tiles_x) + static_cast<std::size_t>(tx)];
  }
};

/// Screen-space extent used for binning: 3 * sqrt(largest eigenvalue).
double splat_radius(const SymMat2& cov);

TileList build_tiles(std::span<const Gaussian2D> splats, int width, int height, int tile_size = 16,
                     TieBreak tie_break = TieBreak::InputIndex);

struct RasterConfig {
  ShadeScheme scheme = ShadeScheme::analytic();
  Rgb background;
  BlendOptions blend;
  TieBreak tie_break = TieBreak::InputIndex;
  int tile_size = 16;
  double min_eigenvalue = 0.09;   // (0.3 px)^2
  double max_eigenvalue = 43.56;  // (6.6 px)^2
  double center_dilation = 0.3;   // px^2 added to the diagonal for CenterSample only
};

struct RenderState;

/// Forward state kept for the backward pass.
struct BlendRecord {
  int width = 0;
  int height = 0;
  std::vector<double> final_transmittance;  // per pixel
  std::vector<int> contributors;            // per pixel
  Rgb background;
  std::shared_ptr<const RenderState> state;
};

struct RasterOutput {
  Image image;
  BlendRecord record;
};

/// Shades splats as given (screen space). Splats with non-finite or
/// non-PSD covariance are dropped.
RasterOutput rasterize(std::span<const Gaussian2D> splats, int width, int height, const RasterConfig& cfg = {});

/// Gradient of a loss with respect to every input splat of rasterize, given
/// dL/dImage. Throws UnsupportedOperation for SuperSample and Prefilter.
std::vector<GaussGrad> rasterize_backward(const BlendRecord& record, const Image& d_image);

/// Eigenvalue clamp applied before shading. Returns the input unchanged
/// when nothing is clamped.
SymMat2 clamp_eigenvalues(const SymMat2& cov, double lo, double hi);

/// Chains dL/d(clamped cov) back to dL/d(cov).
SymMat2 clamp_eigenvalues_backward(const SymMat2& cov, double lo, double hi, const SymMat2& d_clamped);

struct SceneRender {
  Image image;
  BlendRecord record;
  std::vector<Gaussian2D> splats;   // projected, non-culled Gaussians
  std::vector<std::size_t> source;  // index into the 3D list for each splat
};

/// Projects and rasterizes world-space Gaussians.
SceneRender render(std::span<const Gaussian3D> gaussians, const Camera& cam, const RasterConfig& cfg = {});

/// Per-splat screen-space gradients (aligned with SceneRender::splats).
std::vector<GaussGrad> render_backward(const SceneRender& r, const Image& d_image);

/// Full chain to world-space parameters, one entry per input Gaussian
/// (zero for culled ones).
std::vector<Gaussian3DGrad> render_backward_3d(const SceneRender& r, std::span<const Gaussian3D> gaussians,
                                               const Camera& cam, const Image& d_image);

}  // namespace asplat

#pragma once

// Front-to-back alpha compositing of one pixel and its reverse-mode replay.
// Shared by the tile rasterizer and the standalone per-pixel backward so the
// two cannot drift apart.

#include <algorithm>
#include <vector>

#include "asplat/vec.hpp"

namespace asplat {

struct BlendOptions {
  double min_alpha = 1.0 / 255.0;     // skip contributions below this
  double max_alpha = 0.99;            // clamp on opacity * response
  double min_transmittance = 1e-4;    // early termination threshold
  bool early_termination = true;
};

/// One splat's contribution at a pixel: alpha_response = opacity * response
/// before the max_alpha clamp.
struct BlendTerm {
  double alpha_response = 0.0;
  Rgb color;
};

struct BlendForward {
  Rgb color;
  double final_transmittance = 1.0;
  int last_contributor = -1;  // index of the last term that was composited
  int contributors = 0;
};

/// term(k) -> BlendTerm for k in [0, count).
template <class TermFn>
BlendForward blend_forward(int count, TermFn&& term, const Rgb& background,
                           const BlendOptions& opt = {}) {
  BlendForward out;
  double T = 1.0;
  for (int k = 0; k < count; ++k) {
    const BlendTerm t = term(k);
    const double a = std::min(opt.max_alpha, t.alpha_response);
    if (a < opt.min_alpha) continue;
    const double next_T = T * (1.0 - a);
    if (opt.early_termination && next_T < opt.min_transmittance) break;
    out.color += t.color * (a * T);
    T = next_T;
    out.last_contributor = k;
    ++out.contributors;
  }
  out.color += background * T;
  out.final_transmittance = T;
  return out;
}

/// Back-to-front replay from the recorded forward state. For each composited
/// term calls sink(k, dL/d alpha_response, dL/d color). The derivative is zero
/// where the max_alpha clamp was active.
///
/// Transmittance is rebuilt front to back rather than divided out, so fully
/// opaque terms (alpha = 1 when max_alpha allows it) stay finite.
template <class TermFn, class Sink>
void blend_backward(const BlendForward& fwd, TermFn&& term, const Rgb& background,
                    const Rgb& upstream, Sink&& sink, const BlendOptions& opt = {}) {
  struct Active {
    int k;
    double a;
    bool clamped;
    Rgb color;
    double T;
  };
  thread_local std::vector<Active> active;
  active.clear();
  for (int k = 0; k <= fwd.last_contributor; ++k) {
    const BlendTerm t = term(k);
    const double a = std::min(opt.max_alpha, t.alpha_response);
    if (a < opt.min_alpha) continue;
    active.push_back({k, a, t.alpha_response > opt.max_alpha, t.color, 0.0});
  }
  double T = 1.0;
  for (Active& e : active) {
    e.T = T;
    T *= 1.0 - e.a;
  }

  const double bg_dot = dot(background, upstream);
  Rgb behind;           // colour composited behind the current term, per unit transmittance
  double suffix = 1.0;  // product of (1 - a) over the terms behind
  for (auto it = active.rbegin(); it != active.rend(); ++it) {
    const Rgb d_color = upstream * (it->a * it->T);
    double d_a = it->T * (dot(it->color - behind, upstream) - bg_dot * suffix);
    if (it->clamped) d_a = 0.0;
    sink(it->k, d_a, d_color);
    behind = it->color * it->a + behind * (1.0 - it->a);
    suffix *= 1.0 - it->a;
  }
}

}  // namespace asplat

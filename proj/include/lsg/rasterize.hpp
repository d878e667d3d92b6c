#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "lsg/binning.hpp"
#include "lsg/framebuffer.hpp"
#include "lsg/intersect.hpp"
#include "lsg/parallel.hpp"

namespace lsg {

// Density of a projected Gaussian at a pixel center (Eq.-1 style), with the
// 0.99 stability clamp applied.
template <typename S>
S pixel_density(const ProjectedGaussian<S>& pg, const Vec2<S>& p,
                S alpha_clamp = S(0.99)) {
  const Vec2<S> d = p - pg.mu;
  return splat_alpha(pg.conic(), pg.opacity, d.x(), d.y(), alpha_clamp);
}

struct TileRenderCounters {
  std::size_t blended_pairs = 0;
  std::size_t early_stops = 0;
};

namespace detail {

// Per-splat constants hoisted out of the pixel loop. q_skip is a
// conservative quadratic-form cutoff: q > q_skip guarantees alpha < tau, so
// the exp can be skipped without changing any blend decision.
template <typename S>
struct SplatRef {
  Vec3<S> conic;
  Vec2<S> mu;
  S opacity;
  S q_skip;
  S depth;
  Color<S> color;
};

template <typename S>
SplatRef<S> make_splat_ref(const ProjectedGaussian<S>& pg, S tau) {
  return {pg.conic(), pg.mu, pg.opacity,
          S(2) * std::log(pg.opacity / tau) + S(1), pg.depth, pg.color};
}

// Front-to-back blend of one pixel. Writes color/depth/depth_max at `idx`.
template <typename S, typename Iter>
void blend_pixel(Iter first, Iter last, const Vec2<S>& p,
                 const RenderConfig<S>& cfg, FrameBuffers<S>& fb,
                 std::size_t idx, bool allow_early_stop,
                 TileRenderCounters& counters) {
  S t = S(1);
  Color<S> accum = Color<S>::Zero();
  S accum_alpha = S(0), accum_depth = S(0);
  S last_depth = S(0);
  bool any = false, stopped = false;
  S stop_depth = S(0);
  for (Iter it = first; it != last; ++it) {
    const SplatRef<S>& s = *it;
    const S dx = p.x() - s.mu.x();
    const S dy = p.y() - s.mu.y();
    const S q = s.conic[0] * dx * dx + S(2) * s.conic[1] * dx * dy +
                s.conic[2] * dy * dy;
    if (q > s.q_skip) continue;
    S alpha = s.opacity * std::exp(-q / S(2));
    if (alpha > cfg.alpha_clamp) alpha = cfg.alpha_clamp;
    if (alpha < cfg.tau) continue;
    const S w = alpha * t;
    accum += w * s.color;
    accum_alpha += w;
    accum_depth += w * s.depth;
    last_depth = s.depth;
    any = true;
    ++counters.blended_pairs;
    t *= (S(1) - alpha);
    if (allow_early_stop && t < cfg.t_stop) {
      stopped = true;
      stop_depth = s.depth;
      ++counters.early_stops;
      break;
    }
  }
  fb.color[idx] = accum + t * fb.background;
  if (accum_alpha > S(1e-6)) {
    fb.depth[idx] = cfg.normalize_depth ? accum_depth / accum_alpha : accum_depth;
  } else {
    fb.depth[idx] = std::numeric_limits<S>::quiet_NaN();
  }
  fb.depth_max[idx] = stopped ? stop_depth : (any ? last_depth : S(0));
  fb.valid[idx] = 1;
  fb.interp[idx] = 0;
}

}  // namespace detail

// Blends one tile's depth-sorted pairs into the framebuffer. With
// `only_invalid` set, pixels already valid are left untouched (pixel-warp
// hole filling).
template <typename S>
void render_tile(int tile_id, const std::vector<TilePair<S>>& pairs,
                 const std::vector<ProjectedGaussian<S>>& splats,
                 const TileGrid& grid, const RenderConfig<S>& cfg,
                 FrameBuffers<S>& fb, TileRenderCounters& counters,
                 bool only_invalid = false) {
  std::vector<detail::SplatRef<S>> refs;
  refs.reserve(pairs.size());
  for (const auto& pr : pairs)
    refs.push_back(detail::make_splat_ref(splats[pr.splat], cfg.tau));

  const int px0 = grid.tile_x(tile_id) * kTileSize;
  const int py0 = grid.tile_y(tile_id) * kTileSize;
  const int xmax = std::min(px0 + kTileSize, fb.width);
  const int ymax = std::min(py0 + kTileSize, fb.height);
  for (int y = py0; y < ymax; ++y) {
    for (int x = px0; x < xmax; ++x) {
      const std::size_t idx = fb.index(x, y);
      if (only_invalid && fb.valid[idx]) continue;
      const Vec2<S> p(pixel_center<S>(x), pixel_center<S>(y));
      detail::blend_pixel(refs.begin(), refs.end(), p, cfg, fb, idx,
                          cfg.early_stop, counters);
    }
  }
}

struct FrameWorkload {
  std::size_t gaussians_in = 0;
  std::size_t culled = 0;  // frustum + non-PD + sub-tau drops
  std::size_t pairs = 0;
  std::size_t pairs_after_dpes = 0;
  std::size_t blended_pairs = 0;
  std::size_t early_stops = 0;
  std::size_t tiles_interpolated = 0;
  std::size_t tiles_rerendered = 0;
};

// Full pipeline for one view: cull, project, intersect, bin, sort, blend.
template <typename S>
FrameBuffers<S> render_frame_full(const GaussianSet<S>& set,
                                  const CameraPose<S>& pose,
                                  const RenderConfig<S>& cfg,
                                  FrameWorkload* workload = nullptr) {
  const TileGrid grid(pose.width, pose.height);
  auto proj = project_scene(set, pose, cfg);
  auto pairs = build_pairs(proj.splats, grid, cfg);
  parallel_for(pairs.tiles.size(),
               [&](std::size_t t) { depth_sort_tile(pairs.tiles[t]); }, 8);

  FrameBuffers<S> fb(pose.width, pose.height, cfg.background);
  std::vector<TileRenderCounters> counters(pairs.tiles.size());
  parallel_for(pairs.tiles.size(), [&](std::size_t t) {
    render_tile(static_cast<int>(t), pairs.tiles[t], proj.splats, grid, cfg,
                fb, counters[t]);
  }, 1);

  if (workload) {
    workload->gaussians_in = set.gaussians.size();
    workload->culled = set.gaussians.size() - proj.splats.size();
    workload->pairs = pairs.total_pairs;
    workload->pairs_after_dpes = pairs.total_pairs;
    workload->tiles_rerendered = static_cast<std::size_t>(grid.count());
    for (const auto& c : counters) {
      workload->blended_pairs += c.blended_pairs;
      workload->early_stops += c.early_stops;
    }
  }
  return fb;
}

// Verification oracle: per pixel, walk every frustum-surviving splat in
// global depth order with the same tau skip rule and blend math, but no
// tiling, no intersection test energy, and no early stopping.
template <typename S>
FrameBuffers<S> brute_force_reference(const GaussianSet<S>& set,
                                      const CameraPose<S>& pose,
                                      const RenderConfig<S>& cfg) {
  auto proj = project_scene(set, pose, cfg);
  std::vector<int> order(proj.splats.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (proj.splats[a].depth != proj.splats[b].depth)
      return proj.splats[a].depth < proj.splats[b].depth;
    return proj.splats[a].id < proj.splats[b].id;
  });
  std::vector<detail::SplatRef<S>> refs;
  refs.reserve(order.size());
  for (int i : order)
    refs.push_back(detail::make_splat_ref(proj.splats[i], cfg.tau));

  FrameBuffers<S> fb(pose.width, pose.height, cfg.background);
  parallel_for(static_cast<std::size_t>(pose.height), [&](std::size_t y) {
    TileRenderCounters row_counters;
    for (int x = 0; x < pose.width; ++x) {
      const Vec2<S> p(pixel_center<S>(x), pixel_center<S>(static_cast<int>(y)));
      detail::blend_pixel(refs.begin(), refs.end(), p, cfg, fb,
                          fb.index(x, static_cast<int>(y)), false, row_counters);
    }
  }, 1);
  return fb;
}

}  // namespace lsg

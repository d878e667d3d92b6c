#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "lsg/config.hpp"
#include "lsg/projection.hpp"

namespace lsg {

namespace detail {

// Inclusive tile index range covering the pixel interval [lo, hi], clipped
// to [0, tiles). Touching a tile edge counts as overlap.
template <typename S>
std::pair<int, int> tile_span(S lo, S hi, int tiles) {
  int t0 = static_cast<int>(std::floor(lo / S(kTileSize)));
  int t1 = static_cast<int>(std::floor(hi / S(kTileSize)));
  if (t0 < 0) t0 = 0;
  if (t1 > tiles - 1) t1 = tiles - 1;
  return {t0, t1};
}

}  // namespace detail

// Density of a splat at offset (dx, dy) from its center, with the 0.99
// stability clamp. conic = (a, b, c) packs the inverse 2D covariance.
template <typename S>
inline S splat_alpha(const Vec3<S>& conic, S opacity, S dx, S dy,
                     S alpha_clamp) {
  const S q = conic[0] * dx * dx + S(2) * conic[1] * dx * dy +
              conic[2] * dy * dy;
  const S alpha = opacity * std::exp(-q / S(2));
  return alpha > alpha_clamp ? alpha_clamp : alpha;
}

// Baseline test: every tile overlapping the circumscribed square of the
// 3-sigma circle (half extent 3*sqrt(lambda1)).
template <typename S>
std::vector<int> aabb_tiles_baseline(const ProjectedGaussian<S>& pg,
                                     const TileGrid& grid) {
  const S r = S(3) * std::sqrt(pg.lambda1);
  const auto [x0, x1] = detail::tile_span(pg.mu.x() - r, pg.mu.x() + r, grid.tiles_x);
  const auto [y0, y1] = detail::tile_span(pg.mu.y() - r, pg.mu.y() + r, grid.tiles_y);
  std::vector<int> out;
  for (int ty = y0; ty <= y1; ++ty)
    for (int tx = x0; tx <= x1; ++tx) out.push_back(grid.index(tx, ty));
  return out;
}

// Stage 1 of the accurate test: tiles overlapping the tight iso-opacity
// bounding box. Also the `tight` intersection mode on its own.
template <typename S>
std::vector<int> tight_bbox_tiles(const ProjectedGaussian<S>& pg,
                                  const TileGrid& grid) {
  const auto [x0, x1] = detail::tile_span(pg.mu.x() - pg.bbox_half.x(),
                                          pg.mu.x() + pg.bbox_half.x(),
                                          grid.tiles_x);
  const auto [y0, y1] = detail::tile_span(pg.mu.y() - pg.bbox_half.y(),
                                          pg.mu.y() + pg.bbox_half.y(),
                                          grid.tiles_y);
  std::vector<int> out;
  for (int ty = y0; ty <= y1; ++ty)
    for (int tx = x0; tx <= x1; ++tx) out.push_back(grid.index(tx, ty));
  return out;
}

// Two-stage test: stage 1 is the tight bounding box, stage 2 rejects a
// tile by the distance from its center to the splat along the minor axis.
// The conservative form p - r > R_minor never rejects a truly intersecting
// tile; the literal form p + r > R_minor is the published variant.
template <typename S>
std::vector<int> two_stage_tiles(const ProjectedGaussian<S>& pg,
                                 const TileGrid& grid,
                                 const RenderConfig<S>& cfg) {
  const auto [x0, x1] = detail::tile_span(pg.mu.x() - pg.bbox_half.x(),
                                          pg.mu.x() + pg.bbox_half.x(),
                                          grid.tiles_x);
  const auto [y0, y1] = detail::tile_span(pg.mu.y() - pg.bbox_half.y(),
                                          pg.mu.y() + pg.bbox_half.y(),
                                          grid.tiles_y);
  const S r = TileGrid::circumradius<S>();
  std::vector<int> out;
  for (int ty = y0; ty <= y1; ++ty) {
    for (int tx = x0; tx <= x1; ++tx) {
      const int id = grid.index(tx, ty);
      const Vec2<S> d = grid.tile_center<S>(id) - pg.mu;
      const S p = std::abs(d.dot(pg.e_minor));
      const bool reject = cfg.stage2_form == Stage2Form::kConservative
                              ? (p - r > pg.r_minor)
                              : (p + r > pg.r_minor);
      if (!reject) out.push_back(id);
    }
  }
  return out;
}

// Ground-truth oracle: a tile intersects iff some pixel center inside it
// has density >= tau. Scans pixel centers over the stage-1 tiles.
template <typename S>
std::vector<int> exact_tiles(const ProjectedGaussian<S>& pg,
                             const TileGrid& grid, S tau) {
  const Vec3<S> conic = pg.conic();
  std::vector<int> out;
  for (int id : tight_bbox_tiles(pg, grid)) {
    const int px0 = grid.tile_x(id) * kTileSize;
    const int py0 = grid.tile_y(id) * kTileSize;
    bool hit = false;
    for (int y = 0; y < kTileSize && !hit; ++y) {
      const S dy = pixel_center<S>(py0 + y) - pg.mu.y();
      for (int x = 0; x < kTileSize; ++x) {
        const S dx = pixel_center<S>(px0 + x) - pg.mu.x();
        if (splat_alpha(conic, pg.opacity, dx, dy, S(0.99)) >= tau) {
          hit = true;
          break;
        }
      }
    }
    if (hit) out.push_back(id);
  }
  return out;
}

template <typename S>
std::vector<int> tiles_for_splat(const ProjectedGaussian<S>& pg,
                                 const TileGrid& grid,
                                 const RenderConfig<S>& cfg) {
  switch (cfg.intersection_mode) {
    case IntersectionMode::kAabb3Sigma: return aabb_tiles_baseline(pg, grid);
    case IntersectionMode::kTight: return tight_bbox_tiles(pg, grid);
    case IntersectionMode::kTwoStage: return two_stage_tiles(pg, grid, cfg);
    case IntersectionMode::kExact: return exact_tiles(pg, grid, cfg.tau);
  }
  return {};
}

}  // namespace lsg

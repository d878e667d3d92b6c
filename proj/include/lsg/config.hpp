#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "lsg/core.hpp"

namespace lsg {

enum class IntersectionMode { kAabb3Sigma, kTight, kTwoStage, kExact };
enum class Stage2Form { kConservative, kLiteral };

inline IntersectionMode intersection_mode_from_string(const std::string& s) {
  if (s == "aabb3sigma") return IntersectionMode::kAabb3Sigma;
  if (s == "tight") return IntersectionMode::kTight;
  if (s == "two_stage") return IntersectionMode::kTwoStage;
  if (s == "exact") return IntersectionMode::kExact;
  throw std::invalid_argument("unknown intersection mode: " + s);
}

inline std::string to_string(IntersectionMode m) {
  switch (m) {
    case IntersectionMode::kAabb3Sigma: return "aabb3sigma";
    case IntersectionMode::kTight: return "tight";
    case IntersectionMode::kTwoStage: return "two_stage";
    case IntersectionMode::kExact: return "exact";
  }
  return "?";
}

// Rasterization thresholds and intersection-test selection.
template <typename S>
struct RenderConfig {
  S tau = S(1) / S(255);     // minimum density that contributes
  S t_stop = S(1e-4);        // transmittance early-stop threshold
  IntersectionMode intersection_mode = IntersectionMode::kTwoStage;
  Stage2Form stage2_form = Stage2Form::kConservative;
  S cov_dilation = S(0.3);   // added to both 2D covariance diagonals
  S alpha_clamp = S(0.99);
  bool early_stop = true;
  bool normalize_depth = true;  // opacity-weighted depth over accumulated alpha
  Color<S> background = Color<S>::Zero();
};

// Uniform 16x16 tiling of the (padded) image plane.
struct TileGrid {
  int tiles_x = 0;
  int tiles_y = 0;

  TileGrid() = default;
  TileGrid(int width, int height)
      : tiles_x((width + kTileSize - 1) / kTileSize),
        tiles_y((height + kTileSize - 1) / kTileSize) {}

  int count() const { return tiles_x * tiles_y; }
  int index(int tx, int ty) const { return ty * tiles_x + tx; }
  int tile_x(int id) const { return id % tiles_x; }
  int tile_y(int id) const { return id / tiles_x; }

  template <typename S>
  Vec2<S> tile_center(int id) const {
    return {S(tile_x(id) * kTileSize) + S(kTileSize) / S(2),
            S(tile_y(id) * kTileSize) + S(kTileSize) / S(2)};
  }

  // Distance from a tile's center to its corner.
  template <typename S>
  static S circumradius() {
    return S(kTileSize) / S(2) * S(M_SQRT2);
  }
};

}  // namespace lsg

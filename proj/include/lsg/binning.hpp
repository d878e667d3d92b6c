#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <optional>
#include <vector>

#include "lsg/intersect.hpp"
#include "lsg/parallel.hpp"

namespace lsg {

// One Gaussian-tile work item. `splat` indexes the frame's projected-splat
// array; `id` is the persistent Gaussian id used for depth tie-breaking.
template <typename S>
struct TilePair {
  int id;
  S depth;
  int splat;
};

template <typename S>
struct PairList {
  std::vector<std::vector<TilePair<S>>> tiles;
  std::size_t total_pairs = 0;

  void recount() {
    total_pairs = 0;
    for (const auto& t : tiles) total_pairs += t.size();
  }
};

// Per-tile early-stop depth bound; nullopt = unbounded.
template <typename S>
using TileDepthBounds = std::vector<std::optional<S>>;

// Emits (gaussian, tile) pairs under the configured intersection test.
// Tile lists are computed per splat in parallel and merged in id order, so
// per-tile insertion order always equals the projected-list order.
template <typename S>
PairList<S> build_pairs(const std::vector<ProjectedGaussian<S>>& splats,
                        const TileGrid& grid, const RenderConfig<S>& cfg) {
  std::vector<std::vector<int>> hit(splats.size());
  parallel_for(splats.size(), [&](std::size_t i) {
    hit[i] = tiles_for_splat(splats[i], grid, cfg);
  });
  PairList<S> out;
  out.tiles.resize(static_cast<std::size_t>(grid.count()));
  for (std::size_t i = 0; i < splats.size(); ++i) {
    for (int tile : hit[i]) {
      out.tiles[tile].push_back(
          {splats[i].id, splats[i].depth, static_cast<int>(i)});
      ++out.total_pairs;
    }
  }
  return out;
}

// Ascending depth, ties by gaussian id.
template <typename S>
void depth_sort_tile(std::vector<TilePair<S>>& pairs) {
  for (const auto& p : pairs) assert(!std::isnan(p.depth));
  std::sort(pairs.begin(), pairs.end(), [](const TilePair<S>& a, const TilePair<S>& b) {
    if (a.depth != b.depth) return a.depth < b.depth;
    return a.id < b.id;
  });
}

// Removes pairs beyond the tile's predicted early-stop depth. Runs before
// sorting; an unbounded entry is the identity.
template <typename S>
void dpes_cull(std::vector<TilePair<S>>& pairs, const std::optional<S>& bound) {
  if (!bound) return;
  const S d = *bound;
  pairs.erase(std::remove_if(pairs.begin(), pairs.end(),
                             [d](const TilePair<S>& p) { return p.depth > d; }),
              pairs.end());
}

}  // namespace lsg

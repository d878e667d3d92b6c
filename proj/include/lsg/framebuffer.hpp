#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "lsg/core.hpp"

namespace lsg {

// Per-frame buffers. `depth` is the opacity-weighted scene depth (NaN where
// no Gaussian reached the pixel); `depth_max` is the truncated depth: the
// depth at which blending terminated. `valid` marks pixels with a render or
// reprojection source; `interp` marks pixels that were filled by
// interpolation and must not be forward-warped when masking is on.
template <typename S>
struct FrameBuffers {
  int width = 0, height = 0;
  std::vector<Color<S>> color;
  std::vector<S> depth;
  std::vector<S> depth_max;
  std::vector<std::uint8_t> valid;
  std::vector<std::uint8_t> interp;
  Color<S> background = Color<S>::Zero();

  FrameBuffers() = default;
  FrameBuffers(int w, int h, const Color<S>& bg)
      : width(w),
        height(h),
        color(static_cast<std::size_t>(w) * h, bg),
        depth(static_cast<std::size_t>(w) * h, std::numeric_limits<S>::quiet_NaN()),
        depth_max(static_cast<std::size_t>(w) * h, S(0)),
        valid(static_cast<std::size_t>(w) * h, 0),
        interp(static_cast<std::size_t>(w) * h, 0),
        background(bg) {}

  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * width + x;
  }
  std::size_t size() const { return color.size(); }
  bool has_depth(std::size_t i) const { return !std::isnan(depth[i]); }
};

}  // namespace lsg

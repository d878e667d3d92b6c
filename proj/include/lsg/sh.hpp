#pragma once

#include <stdexcept>

#include "lsg/core.hpp"

namespace lsg {

// Real spherical-harmonic basis constants, degrees 0..3, in the sign
// convention used by trained splat models.
namespace sh {
inline constexpr double kC0 = 0.28209479177387814;
inline constexpr double kC1 = 0.4886025119029199;
inline constexpr double kC2[5] = {1.0925484305920792, -1.0925484305920792,
                                  0.31539156525252005, -1.0925484305920792,
                                  0.5462742152960396};
inline constexpr double kC3[7] = {-0.5900435899266435, 2.890611442640554,
                                  -0.4570457994644658, 0.3731763325901154,
                                  -0.4570457994644658, 1.445305721320277,
                                  -0.5900435899266435};
}  // namespace sh

// Evaluates the 48-coefficient color field (rows = band coefficients,
// columns = r,g,b) along a unit view direction. The result carries the
// +0.5 offset and is clamped per channel to [0,1].
template <typename S>
Color<S> sh_to_color(const Eigen::Matrix<S, 16, 3>& coeffs,
                     const Vec3<S>& view_dir, int degree) {
  if (degree < 0 || degree > 3)
    throw std::invalid_argument("sh_to_color: degree must be in [0,3]");

  Vec3<S> c = S(sh::kC0) * coeffs.row(0).transpose();
  if (degree >= 1) {
    const S x = view_dir.x(), y = view_dir.y(), z = view_dir.z();
    c += S(sh::kC1) * (-y * coeffs.row(1) + z * coeffs.row(2) -
                       x * coeffs.row(3)).transpose();
    if (degree >= 2) {
      const S xx = x * x, yy = y * y, zz = z * z;
      const S xy = x * y, yz = y * z, xz = x * z;
      c += (S(sh::kC2[0]) * xy * coeffs.row(4) +
            S(sh::kC2[1]) * yz * coeffs.row(5) +
            S(sh::kC2[2]) * (S(2) * zz - xx - yy) * coeffs.row(6) +
            S(sh::kC2[3]) * xz * coeffs.row(7) +
            S(sh::kC2[4]) * (xx - yy) * coeffs.row(8)).transpose();
      if (degree >= 3) {
        c += (S(sh::kC3[0]) * y * (S(3) * xx - yy) * coeffs.row(9) +
              S(sh::kC3[1]) * xy * z * coeffs.row(10) +
              S(sh::kC3[2]) * y * (S(4) * zz - xx - yy) * coeffs.row(11) +
              S(sh::kC3[3]) * z * (S(2) * zz - S(3) * xx - S(3) * yy) *
                  coeffs.row(12) +
              S(sh::kC3[4]) * x * (S(4) * zz - xx - yy) * coeffs.row(13) +
              S(sh::kC3[5]) * z * (xx - yy) * coeffs.row(14) +
              S(sh::kC3[6]) * x * (xx - S(3) * yy) * coeffs.row(15)).transpose();
      }
    }
  }
  return (c.array() + S(0.5)).cwiseMax(S(0)).cwiseMin(S(1));
}

}  // namespace lsg

#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace lsg {

template <typename S> using Vec2 = Eigen::Matrix<S, 2, 1>;
template <typename S> using Vec3 = Eigen::Matrix<S, 3, 1>;
template <typename S> using Mat2 = Eigen::Matrix<S, 2, 2>;
template <typename S> using Mat3 = Eigen::Matrix<S, 3, 3>;
template <typename S> using Quat = Eigen::Quaternion<S>;
template <typename S> using Color = Eigen::Array<S, 3, 1>;

// Image tiles are 16x16 pixels; pixel centers sit at integer + 0.5.
inline constexpr int kTileSize = 16;

template <typename S>
constexpr S pixel_center(int i) { return static_cast<S>(i) + S(0.5); }

}  // namespace lsg

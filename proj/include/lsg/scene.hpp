#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "lsg/core.hpp"
#include "lsg/sh.hpp"

namespace lsg {

// One scene primitive. Scale is linear (post-activation), opacity is in
// [0,1] (post-logistic), rotation is a unit quaternion.
template <typename S>
struct Gaussian3 {
  Vec3<S> position = Vec3<S>::Zero();
  Vec3<S> scale = Vec3<S>::Ones();
  Quat<S> rotation = Quat<S>::Identity();  // (w,x,y,z)
  S opacity = S(1);
  Eigen::Matrix<S, 16, 3> sh = Eigen::Matrix<S, 16, 3>::Zero();

  Mat3<S> covariance() const {
    Mat3<S> r = rotation.toRotationMatrix();
    return r * scale.array().square().matrix().asDiagonal() * r.transpose();
  }
};

// Index into `gaussians` is the persistent id for the whole run.
template <typename S>
struct GaussianSet {
  std::vector<Gaussian3<S>> gaussians;
  int sh_degree = 0;

  std::size_t size() const { return gaussians.size(); }
};

// World-to-camera pose plus pinhole intrinsics. Width and height are kept
// as positive multiples of 16; loaders pad odd sizes up.
template <typename S>
struct CameraPose {
  Mat3<S> rotation = Mat3<S>::Identity();
  Vec3<S> translation = Vec3<S>::Zero();
  S fx = S(1), fy = S(1);
  S cx = S(0), cy = S(0);
  int width = 16, height = 16;
  S near_clip = S(0.01);

  Vec3<S> to_camera(const Vec3<S>& world) const {
    return rotation * world + translation;
  }
  Vec3<S> to_world(const Vec3<S>& cam) const {
    return rotation.transpose() * (cam - translation);
  }
  Vec3<S> center() const { return -(rotation.transpose() * translation); }
  Vec2<S> project(const Vec3<S>& cam) const {
    return {fx * cam.x() / cam.z() + cx, fy * cam.y() / cam.z() + cy};
  }

  bool same_intrinsics(const CameraPose& o) const {
    return fx == o.fx && fy == o.fy && cx == o.cx && cy == o.cy &&
           width == o.width && height == o.height && near_clip == o.near_clip;
  }
};

template <typename S>
struct Trajectory {
  std::vector<CameraPose<S>> poses;
  S fps = S(90);
  int full_render_period = 6;  // n + 1
};

inline int pad_to_tile(int v) {
  return ((v + kTileSize - 1) / kTileSize) * kTileSize;
}

// mt19937_64's output sequence is pinned by the standard while the
// std distributions are not, so uniforms are derived from raw engine
// words to keep generated scenes byte-identical across toolchains.
class SceneRng {
 public:
  explicit SceneRng(std::uint64_t seed) : eng_(seed) {}
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::mt19937_64 eng_;
};

// Deterministic desk-scale scene: positions uniform in a centered box,
// per-axis scales log-uniform in [0.005, 0.1]*extent, opacity uniform in
// [0.2, 1], uniformly random orientation, degree-0 color.
template <typename S>
GaussianSet<S> generate_synthetic_scene(std::uint64_t seed, int count,
                                        S extent) {
  if (count < 0) throw std::invalid_argument("synthetic scene: count < 0");
  SceneRng rng(seed);
  GaussianSet<S> set;
  set.sh_degree = 0;
  set.gaussians.reserve(static_cast<std::size_t>(count));
  const double lo = std::log(0.005 * static_cast<double>(extent));
  const double hi = std::log(0.1 * static_cast<double>(extent));
  for (int i = 0; i < count; ++i) {
    Gaussian3<S> g;
    for (int a = 0; a < 3; ++a)
      g.position[a] = S(rng.uniform(-0.5 * extent, 0.5 * extent));
    for (int a = 0; a < 3; ++a)
      g.scale[a] = S(std::exp(rng.uniform(lo, hi)));
    // Shoemake's subgroup method: uniform rotations from three uniforms.
    const double u1 = rng.uniform(), u2 = rng.uniform(), u3 = rng.uniform();
    const double s1 = std::sqrt(1.0 - u1), s2 = std::sqrt(u1);
    const double a2 = 2.0 * M_PI * u2, a3 = 2.0 * M_PI * u3;
    g.rotation = Quat<S>(S(s2 * std::cos(a3)), S(s1 * std::sin(a2)),
                         S(s1 * std::cos(a2)), S(s2 * std::sin(a3)));
    g.opacity = S(rng.uniform(0.2, 1.0));
    for (int ch = 0; ch < 3; ++ch)
      g.sh(0, ch) = S((rng.uniform() - 0.5) / sh::kC0);
    set.gaussians.push_back(g);
  }
  return set;
}

template <typename S>
S geodesic_angle(const Quat<S>& a, const Quat<S>& b) {
  return a.angularDistance(b);
}

// Linear translation + slerp rotation between key poses. Each segment emits
// the fewest frames satisfying both the per-frame translation cap v_max/fps
// and rotation cap omega_max/fps; coincident key poses collapse.
template <typename S>
Trajectory<S> interpolate_trajectory(const std::vector<CameraPose<S>>& keys,
                                     S fps = S(90), S v_max = S(1.8),
                                     S omega_max_deg = S(90)) {
  if (keys.size() < 2)
    throw std::invalid_argument("interpolate_trajectory: need >= 2 key poses");
  for (std::size_t i = 1; i < keys.size(); ++i)
    if (!keys[i].same_intrinsics(keys[0]))
      throw std::invalid_argument(
          "interpolate_trajectory: key poses must share intrinsics");

  const S step_t = v_max / fps;
  const S step_r = omega_max_deg * S(M_PI / 180.0) / fps;

  Trajectory<S> traj;
  traj.fps = fps;
  traj.poses.push_back(keys[0]);
  for (std::size_t i = 1; i < keys.size(); ++i) {
    const CameraPose<S>& a = keys[i - 1];
    const CameraPose<S>& b = keys[i];
    const Quat<S> qa(a.rotation), qb(b.rotation);
    const S dt = (b.translation - a.translation).norm();
    const S dr = geodesic_angle(qa, qb);
    int steps = 0;
    steps = std::max(steps, static_cast<int>(
        std::ceil(static_cast<double>(dt / step_t) - 1e-9)));
    steps = std::max(steps, static_cast<int>(
        std::ceil(static_cast<double>(dr / step_r) - 1e-9)));
    for (int k = 1; k <= steps; ++k) {
      const S s = S(k) / S(steps);
      CameraPose<S> p = a;
      p.translation = (S(1) - s) * a.translation + s * b.translation;
      p.rotation = qa.slerp(s, qb).toRotationMatrix();
      traj.poses.push_back(p);
    }
  }
  return traj;
}

}  // namespace lsg

#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "lsg/config.hpp"
#include "lsg/parallel.hpp"
#include "lsg/scene.hpp"

namespace lsg {

// A 2D splat: the projected footprint of one Gaussian in one view.
template <typename S>
struct ProjectedGaussian {
  int id = -1;
  Vec2<S> mu = Vec2<S>::Zero();        // pixels
  Mat2<S> cov = Mat2<S>::Identity();   // pixels^2, dilated
  S depth = S(0);                      // camera-space z
  S lambda1 = S(0), lambda2 = S(0);    // eigenvalues, lambda1 >= lambda2
  Vec2<S> e_minor = Vec2<S>(0, 1);     // unit semi-minor axis direction
  S r_major = S(0), r_minor = S(0);    // iso-opacity effective radii
  Vec2<S> bbox_half = Vec2<S>::Zero(); // tight half extents (half-W, half-H)
  Color<S> color = Color<S>::Zero();
  S opacity = S(0);

  // Inverse covariance packed as (a, b, c) for a*dx^2 + 2*b*dx*dy + c*dy^2.
  Vec3<S> conic() const {
    const S det = cov(0, 0) * cov(1, 1) - cov(0, 1) * cov(0, 1);
    return {cov(1, 1) / det, -cov(0, 1) / det, cov(0, 0) / det};
  }
};

template <typename S>
struct Eigen2x2 {
  S lambda1;
  S lambda2;
  Vec2<S> e_minor;
};

// Closed-form symmetric 2x2 eigendecomposition. The minor eigenvector
// convention for repeated roots is (0,1).
template <typename S>
Eigen2x2<S> eigen2x2(const Mat2<S>& cov) {
  const S a = cov(0, 0), b = cov(0, 1), c = cov(1, 1);
  const S mid = (a + c) / S(2);
  const S half = (a - c) / S(2);
  const S disc = std::sqrt(half * half + b * b);
  Eigen2x2<S> e;
  e.lambda1 = mid + disc;
  e.lambda2 = mid - disc;
  if (!(e.lambda2 > S(0)))
    throw std::domain_error("eigen2x2: covariance not positive definite");
  if (b != S(0)) {
    Vec2<S> v(b, e.lambda2 - a);
    e.e_minor = v.normalized();
  } else {
    e.e_minor = a >= c ? Vec2<S>(0, 1) : Vec2<S>(1, 0);
  }
  return e;
}

// Iso-opacity radii along the principal axes: the distance at which the
// splat's density decays to tau. Returns nothing when the splat can never
// reach tau (cull signal, not an error).
template <typename S>
std::optional<std::pair<S, S>> effective_radii(S opacity, S lambda1, S lambda2,
                                               S tau) {
  if (!(opacity > tau)) return std::nullopt;
  const S k = S(2) * std::log(opacity / tau);
  return std::make_pair(std::sqrt(k * lambda1), std::sqrt(k * lambda2));
}

// Axis extrema of the iso-opacity ellipse: half-width from the covariance
// x-diagonal, half-height from the y-diagonal.
template <typename S>
Vec2<S> tight_bbox(S opacity, const Mat2<S>& cov, S tau) {
  const S k = S(2) * std::log(opacity / tau);
  return {std::sqrt(k * cov(0, 0)), std::sqrt(k * cov(1, 1))};
}

template <typename S>
struct CulledGaussian {
  int id;
  Vec3<S> cam;  // camera-space position
};

// Keeps Gaussians in front of the near plane whose projected center lies
// within the image rectangle expanded by a cheap 3-sigma screen-size
// estimate. Order is preserved.
template <typename S>
std::vector<CulledGaussian<S>> frustum_cull(const GaussianSet<S>& set,
                                            const CameraPose<S>& pose) {
  std::vector<CulledGaussian<S>> kept;
  kept.reserve(set.gaussians.size());
  const S f = std::max(pose.fx, pose.fy);
  for (std::size_t i = 0; i < set.gaussians.size(); ++i) {
    const auto& g = set.gaussians[i];
    const Vec3<S> cam = pose.to_camera(g.position);
    if (!(cam.z() > pose.near_clip)) continue;
    const Vec2<S> px = pose.project(cam);
    const S margin = S(3) * (g.scale.maxCoeff() * f / cam.z() + S(1));
    if (px.x() < -margin || px.x() > S(pose.width) + margin ||
        px.y() < -margin || px.y() > S(pose.height) + margin)
      continue;
    kept.push_back({static_cast<int>(i), cam});
  }
  return kept;
}

namespace detail {

// EWA-style projection of one Gaussian whose camera-space position is
// already known. Returns nothing when the splat is dropped (non-PD
// covariance after dilation, or opacity at or below tau).
template <typename S>
std::optional<ProjectedGaussian<S>> project_at(
    const Gaussian3<S>& g, int id, const Vec3<S>& cam,
    const CameraPose<S>& pose, const RenderConfig<S>& cfg, int sh_degree) {
  const S z = cam.z();
  ProjectedGaussian<S> pg;
  pg.id = id;
  pg.mu = pose.project(cam);
  pg.depth = z;
  pg.opacity = g.opacity;

  Eigen::Matrix<S, 2, 3> jac;
  jac << pose.fx / z, S(0), -pose.fx * cam.x() / (z * z),
         S(0), pose.fy / z, -pose.fy * cam.y() / (z * z);
  const Eigen::Matrix<S, 2, 3> t = jac * pose.rotation;
  pg.cov = t * g.covariance() * t.transpose();
  pg.cov(0, 0) += cfg.cov_dilation;
  pg.cov(1, 1) += cfg.cov_dilation;
  // enforce exact symmetry against rounding in the triple product
  const S off = (pg.cov(0, 1) + pg.cov(1, 0)) / S(2);
  pg.cov(0, 1) = pg.cov(1, 0) = off;

  const S det = pg.cov(0, 0) * pg.cov(1, 1) - off * off;
  if (!(det > S(0)) || !(pg.cov(0, 0) > S(0))) return std::nullopt;
  const auto eig = eigen2x2(pg.cov);
  pg.lambda1 = eig.lambda1;
  pg.lambda2 = eig.lambda2;
  pg.e_minor = eig.e_minor;

  const auto radii = effective_radii(g.opacity, eig.lambda1, eig.lambda2, cfg.tau);
  if (!radii) return std::nullopt;
  pg.r_major = radii->first;
  pg.r_minor = radii->second;
  pg.bbox_half = tight_bbox(g.opacity, pg.cov, cfg.tau);

  const Vec3<S> dir = (g.position - pose.center()).normalized();
  pg.color = sh_to_color(g.sh, dir, sh_degree);
  return pg;
}

}  // namespace detail

template <typename S>
std::optional<ProjectedGaussian<S>> project_gaussian(
    const Gaussian3<S>& g, const CameraPose<S>& pose,
    const RenderConfig<S>& cfg, int sh_degree = 0, int id = 0) {
  const Vec3<S> cam = pose.to_camera(g.position);
  if (!(cam.z() > S(0)))
    throw std::invalid_argument("project_gaussian: gaussian behind camera");
  return detail::project_at(g, id, cam, pose, cfg, sh_degree);
}

template <typename S>
struct ProjectionResult {
  std::vector<ProjectedGaussian<S>> splats;  // id-ordered
  std::size_t dropped_nonpd = 0;
  std::size_t dropped_low_opacity = 0;
};

// Frustum-cull and project a whole set. Gaussians are processed in
// parallel into id-ordered slots, then compacted, so the result does not
// depend on the worker count.
template <typename S>
ProjectionResult<S> project_scene(const GaussianSet<S>& set,
                                  const CameraPose<S>& pose,
                                  const RenderConfig<S>& cfg) {
  const auto culled = frustum_cull(set, pose);
  std::vector<std::optional<ProjectedGaussian<S>>> slots(culled.size());
  parallel_for(culled.size(), [&](std::size_t i) {
    const auto& c = culled[i];
    slots[i] = detail::project_at(set.gaussians[c.id], c.id, c.cam, pose, cfg,
                                  set.sh_degree);
  });
  ProjectionResult<S> out;
  out.splats.reserve(culled.size());
  for (std::size_t i = 0; i < culled.size(); ++i) {
    if (slots[i]) {
      out.splats.push_back(*slots[i]);
    } else if (set.gaussians[culled[i].id].opacity > cfg.tau) {
      ++out.dropped_nonpd;
    } else {
      ++out.dropped_low_opacity;
    }
  }
  return out;
}

}  // namespace lsg

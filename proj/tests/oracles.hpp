// Test-only oracles, independent of the implementation paths they check:
// brute-force grid search for the triangulation objective, finite-difference
// derivatives, and seeded scene builders.
#pragma once

#include <optional>
#include <random>
#include <vector>

#include "geom/camera.hpp"
#include "geom/refine.hpp"
#include "geom/se3.hpp"

namespace oracles {

using tubeloc::geom::CameraIntrinsics;
using tubeloc::geom::Observation2D;
using tubeloc::geom::Pose;
using tubeloc::geom::Rotation;
using tubeloc::geom::Twist;
using tubeloc::geom::Vec2;
using tubeloc::geom::Vec3;

inline CameraIntrinsics test_intrinsics() {
  CameraIntrinsics k;
  k.width = 64;
  k.height = 64;
  k.fx = k.fy = 32.0;
  k.cx = k.cy = 32.0;
  return k;
}

// Summed squared reprojection error of a single point; +inf when any camera
// sees it at non-positive depth. Deliberately written without the library's
// project() so the two paths stay independent.
inline double point_cost(const Vec3& point,
                         const std::vector<std::pair<Observation2D, Pose>>& observations,
                         const CameraIntrinsics& k) {
  double total = 0;
  for (const auto& [obs, pose] : observations) {
    const Vec3 q = pose.rotation.matrix().transpose() * (point - pose.position);
    if (q.z() <= 1e-9) return std::numeric_limits<double>::infinity();
    const double u = k.fx * q.x() / q.z() + k.cx;
    const double v = k.fy * q.y() / q.z() + k.cy;
    total += (u - obs.pixel.x()) * (u - obs.pixel.x()) + (v - obs.pixel.y()) * (v - obs.pixel.y());
  }
  return total;
}

// Dense grid argmin of point_cost over a cube centered at `center`.
inline Vec3 grid_search_point(const std::vector<std::pair<Observation2D, Pose>>& observations,
                              const CameraIntrinsics& k, const Vec3& center, double half_width,
                              int samples_per_axis) {
  Vec3 best = center;
  double best_cost = std::numeric_limits<double>::infinity();
  const int n = samples_per_axis;
  for (int ix = 0; ix < n; ++ix)
    for (int iy = 0; iy < n; ++iy)
      for (int iz = 0; iz < n; ++iz) {
        const Vec3 p = center + half_width * Vec3(2.0 * ix / (n - 1) - 1.0,
                                                  2.0 * iy / (n - 1) - 1.0,
                                                  2.0 * iz / (n - 1) - 1.0);
        const double c = point_cost(p, observations, k);
        if (c < best_cost) {
          best_cost = c;
          best = p;
        }
      }
  return best;
}

// Random unit-ish twist scaled to given rotation/translation magnitudes.
inline Twist random_twist(std::mt19937_64& rng, double rot_mag, double trans_mag) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vec3 w(gauss(rng), gauss(rng), gauss(rng));
  Vec3 t(gauss(rng), gauss(rng), gauss(rng));
  if (w.norm() > 1e-12) w *= rot_mag / w.norm();
  if (t.norm() > 1e-12) t *= trans_mag / t.norm();
  Twist tw;
  tw << w, t;
  return tw;
}

inline Pose random_pose(std::mt19937_64& rng, double rot_mag = 0.5, double trans_mag = 50.0) {
  return tubeloc::geom::exp_map(random_twist(rng, rot_mag, trans_mag));
}

// A camera ring with modest baselines, all seeing points near (0, 0, 100).
// z_spread > 0 displaces cameras along the viewing axis, which conditions the
// depth direction of triangulation.
inline std::vector<Pose> camera_ring(std::mt19937_64& rng, int n_cameras, double baseline,
                                     double z_spread = 2.0) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Pose> poses;
  for (int i = 0; i < n_cameras; ++i) {
    const double frac = n_cameras > 1 ? double(i) / (n_cameras - 1) - 0.5 : 0.0;
    const Vec3 pos(2.0 * baseline * frac, 0.25 * baseline * u(rng), z_spread * u(rng));
    // Small rotation keeping the target region in view.
    const Vec3 rot(0.05 * u(rng), 0.05 * u(rng) - 0.6 * pos.x() / 100.0, 0.05 * u(rng));
    poses.emplace_back(Rotation::exp(rot), pos);
  }
  return poses;
}

inline std::vector<Vec3> random_points_in_view(std::mt19937_64& rng, int n,
                                               double lateral = 35.0, double depth_lo = 90.0,
                                               double depth_hi = 115.0) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> depth(depth_lo, depth_hi);
  std::vector<Vec3> pts;
  for (int i = 0; i < n; ++i)
    pts.emplace_back(lateral * u(rng), lateral * u(rng), depth(rng));
  return pts;
}

}  // namespace oracles

// Pinhole camera model: intrinsics, projection, reprojection Jacobians.
#pragma once

#include <optional>
#include <stdexcept>

#include "geom/se3.hpp"

namespace tubeloc::geom {

// Camera-frame depths at or below this are treated as behind-camera [mm].
inline constexpr double kDepthEpsilon = 1e-6;

struct CameraIntrinsics {
  double fx = 0, fy = 0;  // focal lengths, pixels
  double cx = 0, cy = 0;  // principal point, pixels
  int width = 0, height = 0;

  void validate() const {
    if (fx <= 0 || fy <= 0 || cx < 0 || cx >= width || cy < 0 || cy >= height)
      throw std::invalid_argument("CameraIntrinsics: invalid parameters");
  }
  bool contains(const Vec2& px) const {
    return px.x() >= 0 && px.x() < width && px.y() >= 0 && px.y() < height;
  }
};

struct Observation2D {
  Vec2 pixel = Vec2::Zero();
  int image_index = 0;
};

// Projects a world point through a camera-to-world pose. Empty result signals
// behind-camera (camera-frame depth <= kDepthEpsilon); callers must handle it.
inline std::optional<Vec2> project(const Pose& pose, const CameraIntrinsics& k,
                                   const Vec3& world_point) {
  const Vec3 q = pose.to_camera(world_point);
  if (q.z() <= kDepthEpsilon)
    return std::nullopt;
  return Vec2(k.fx * q.x() / q.z() + k.cx, k.fy * q.y() / q.z() + k.cy);
}

// Jacobian of the pixel w.r.t. the camera-frame point q (2x3).
inline Eigen::Matrix<double, 2, 3> pixel_jacobian_wrt_camera_point(const CameraIntrinsics& k,
                                                                   const Vec3& q) {
  const double iz = 1.0 / q.z();
  Eigen::Matrix<double, 2, 3> j;
  j << k.fx * iz, 0, -k.fx * q.x() * iz * iz,
       0, k.fy * iz, -k.fy * q.y() * iz * iz;
  return j;
}

// Jacobians of the reprojection residual r = project(pose, v) - obs at the
// current pose, for the left-multiplicative update pose <- exp(delta) * pose.
//
// With q = R^T (v - P):  dq/domega = R^T [v]_x,  dq/drho = -R^T,  dq/dv = R^T.
struct ReprojectionJacobians {
  Eigen::Matrix<double, 2, 6> pose;   // w.r.t. twist (omega, rho)
  Eigen::Matrix<double, 2, 3> point;  // w.r.t. the world point
};

inline std::optional<ReprojectionJacobians> reprojection_jacobians(const Pose& pose,
                                                                   const CameraIntrinsics& k,
                                                                   const Vec3& world_point) {
  const Vec3 q = pose.to_camera(world_point);
  if (q.z() <= kDepthEpsilon)
    return std::nullopt;
  const Eigen::Matrix<double, 2, 3> ju = pixel_jacobian_wrt_camera_point(k, q);
  const Mat3 rt = pose.rotation.matrix().transpose();
  ReprojectionJacobians out;
  out.pose.leftCols<3>() = ju * rt * skew(world_point);
  out.pose.rightCols<3>() = -(ju * rt);
  out.point = ju * rt;
  return out;
}

}  // namespace tubeloc::geom

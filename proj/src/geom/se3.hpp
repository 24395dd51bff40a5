// Rigid-body pose algebra: SO(3) rotations, SE(3) poses, twist exp/log maps.
//
// Conventions:
//   - Pose is the camera-to-world transform: x_world = R * x_camera + position.
//   - Twist ordering is (rotation xyz [rad], translation xyz [mm]).
//   - Incremental updates are left-multiplicative: pose <- exp(delta) * pose.
#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <optional>

namespace tubeloc::geom {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Twist = Eigen::Matrix<double, 6, 1>;  // (omega, rho)

inline Mat3 skew(const Vec3& v) {
  Mat3 m;
  m << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
  return m;
}

// 3x3 orthonormal matrix with det +1. Construction from a raw matrix is
// validated; composition and inversion stay closed without silent
// re-normalization.
class Rotation {
 public:
  Rotation() : m_(Mat3::Identity()) {}

  static Rotation identity() { return Rotation(); }

  // Validates orthonormality/determinant to `tol`; throws std::invalid_argument.
  static Rotation from_matrix(const Mat3& m, double tol = 1e-9);

  // Trusted constructor for internally generated matrices (exp map, transpose).
  static Rotation from_matrix_unchecked(const Mat3& m) { return Rotation(m); }

  static Rotation from_quaternion(const Eigen::Quaterniond& q) {
    return Rotation(q.normalized().toRotationMatrix());
  }

  // Rodrigues formula; angle = |axis_angle|. Small-angle Taylor branch below 1e-8 rad.
  static Rotation exp(const Vec3& axis_angle);

  // Inverse of exp. Throws std::domain_error when the angle is within 1e-6 of pi
  // (axis sign ill-conditioned there; callers perturb instead).
  Vec3 log() const;

  Rotation inverse() const { return Rotation(m_.transpose()); }
  Rotation operator*(const Rotation& o) const { return Rotation(m_ * o.m_); }
  Vec3 operator*(const Vec3& v) const { return m_ * v; }

  const Mat3& matrix() const { return m_; }
  Eigen::Quaterniond quaternion() const { return Eigen::Quaterniond(m_); }

  // Geodesic angle to another rotation, radians in [0, pi].
  double angle_to(const Rotation& o) const;

  // Max deviation of R^T R from identity plus |det - 1|; 0 for a perfect rotation.
  double orthonormality_error() const;

 private:
  explicit Rotation(const Mat3& m) : m_(m) {}
  Mat3 m_;
};

struct Pose {
  Rotation rotation;
  Vec3 position = Vec3::Zero();

  Pose() = default;
  Pose(const Rotation& r, const Vec3& p) : rotation(r), position(p) {}

  static Pose identity() { return Pose(); }

  Pose operator*(const Pose& o) const {
    return Pose(rotation * o.rotation, rotation * o.position + position);
  }
  Pose inverse() const {
    const Rotation rinv = rotation.inverse();
    return Pose(rinv, -(rinv * position));
  }
  // Applies the transform to a point (camera frame -> world frame).
  Vec3 operator*(const Vec3& v) const { return rotation * v + position; }
  // World frame -> camera frame.
  Vec3 to_camera(const Vec3& world_point) const {
    return rotation.matrix().transpose() * (world_point - position);
  }
};

// SE(3) exponential: Rodrigues rotation with the V-matrix translation coupling.
Pose exp_map(const Twist& twist);

// Inverse of exp_map; requires rotation angle < pi (see Rotation::log).
Twist log_map(const Pose& pose);

}  // namespace tubeloc::geom

#include "geom/se3.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace tubeloc::geom {

namespace {
constexpr double kSmallAngle = 1e-8;  // Taylor branch below this, radians
}

Rotation Rotation::from_matrix(const Mat3& m, double tol) {
  const double err = ((m.transpose() * m) - Mat3::Identity()).cwiseAbs().maxCoeff();
  if (err > tol || std::abs(m.determinant() - 1.0) > tol)
    throw std::invalid_argument("Rotation::from_matrix: matrix is not a rotation");
  return Rotation(m);
}

Rotation Rotation::exp(const Vec3& axis_angle) {
  const double theta = axis_angle.norm();
  const Mat3 k = skew(axis_angle);
  Mat3 r;
  if (theta < kSmallAngle) {
    r = Mat3::Identity() + k + 0.5 * k * k;
  } else {
    const double a = std::sin(theta) / theta;
    const double b = (1.0 - std::cos(theta)) / (theta * theta);
    r = Mat3::Identity() + a * k + b * k * k;
  }
  return Rotation(r);
}

Vec3 Rotation::log() const {
  const double tr = m_.trace();
  const double cos_theta = std::clamp(0.5 * (tr - 1.0), -1.0, 1.0);
  const double theta = std::acos(cos_theta);
  if (std::numbers::pi - theta < 1e-6)
    throw std::domain_error("Rotation::log: angle within 1e-6 of pi");
  const Vec3 w(m_(2, 1) - m_(1, 2), m_(0, 2) - m_(2, 0), m_(1, 0) - m_(0, 1));
  if (theta < kSmallAngle)
    return 0.5 * w;  // sin(theta) ~ theta
  return theta / (2.0 * std::sin(theta)) * w;
}

double Rotation::angle_to(const Rotation& o) const {
  const double tr = (m_ * o.m_.transpose()).trace();
  return std::acos(std::clamp(0.5 * (tr - 1.0), -1.0, 1.0));
}

double Rotation::orthonormality_error() const {
  const double ortho = ((m_.transpose() * m_) - Mat3::Identity()).cwiseAbs().maxCoeff();
  return ortho + std::abs(m_.determinant() - 1.0);
}

Pose exp_map(const Twist& twist) {
  const Vec3 omega = twist.head<3>();
  const Vec3 rho = twist.tail<3>();
  const double theta = omega.norm();
  const Mat3 k = skew(omega);
  Mat3 v;
  if (theta < kSmallAngle) {
    v = Mat3::Identity() + 0.5 * k + (1.0 / 6.0) * k * k;
  } else {
    const double t2 = theta * theta;
    const double b = (1.0 - std::cos(theta)) / t2;
    const double c = (theta - std::sin(theta)) / (t2 * theta);
    v = Mat3::Identity() + b * k + c * k * k;
  }
  return Pose(Rotation::exp(omega), v * rho);
}

Twist log_map(const Pose& pose) {
  const Vec3 omega = pose.rotation.log();
  const double theta = omega.norm();
  const Mat3 k = skew(omega);
  Mat3 v_inv;
  if (theta < kSmallAngle) {
    v_inv = Mat3::Identity() - 0.5 * k + (1.0 / 12.0) * k * k;
  } else {
    const double half = 0.5 * theta;
    // V^-1 = I - K/2 + (1/theta^2)(1 - theta cot(theta/2) / 2) K^2
    const double coef = (1.0 - half * std::cos(half) / std::sin(half)) / (theta * theta);
    v_inv = Mat3::Identity() - 0.5 * k + coef * k * k;
  }
  Twist t;
  t.head<3>() = omega;
  t.tail<3>() = v_inv * pose.position;
  return t;
}

}  // namespace tubeloc::geom

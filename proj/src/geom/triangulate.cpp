#include "geom/triangulate.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace tubeloc::geom {

namespace {

// World-to-pixel projection matrix K [R^T | -R^T P].
Eigen::Matrix<double, 3, 4> projection_matrix(const Pose& pose, const CameraIntrinsics& k) {
  Eigen::Matrix3d km;
  km << k.fx, 0, k.cx, 0, k.fy, k.cy, 0, 0, 1;
  Eigen::Matrix<double, 3, 4> rt;
  const Mat3 rinv = pose.rotation.matrix().transpose();
  rt.leftCols<3>() = rinv;
  rt.col(3) = -(rinv * pose.position);
  return km * rt;
}

std::optional<double> point_objective(
    const Vec3& point, const std::vector<std::pair<Observation2D, Pose>>& observations,
    const CameraIntrinsics& k) {
  double total = 0;
  for (const auto& [obs, pose] : observations) {
    const auto px = project(pose, k, point);
    if (!px) return std::nullopt;
    total += (*px - obs.pixel).squaredNorm();
  }
  return total;
}

}  // namespace

std::optional<Vec3> triangulate_point(
    const std::vector<std::pair<Observation2D, Pose>>& observations, const CameraIntrinsics& k) {
  const std::size_t n = observations.size();
  if (n < 2)
    throw std::invalid_argument("triangulate_point: need >= 2 observations");

  // Widest-baseline pair seeds the linear solve.
  std::size_t ia = 0, ib = 1;
  double best = -1;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double b = (observations[i].second.position - observations[j].second.position).norm();
      if (b > best) {
        best = b;
        ia = i;
        ib = j;
      }
    }
  if (best <= 0)
    return std::nullopt;  // zero baseline

  Eigen::Matrix4d design;
  for (int row = 0; row < 2; ++row) {
    const auto& [obs, pose] = observations[row == 0 ? ia : ib];
    const auto m = projection_matrix(pose, k);
    design.row(2 * row + 0) = obs.pixel.x() * m.row(2) - m.row(0);
    design.row(2 * row + 1) = obs.pixel.y() * m.row(2) - m.row(1);
  }
  Eigen::JacobiSVD<Eigen::Matrix4d> svd(design, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  // sv[3] ~ 0 carries the solution; sv[2] near zero means the nullspace is not
  // one-dimensional (parallel rays).
  if (sv[2] <= 0 || sv[0] / sv[2] > kTriangulationConditionLimit)
    return std::nullopt;
  const Eigen::Vector4d xh = svd.matrixV().col(3);
  if (std::abs(xh[3]) < 1e-12)
    return std::nullopt;
  Vec3 point = xh.head<3>() / xh[3];

  // Gauss-Newton on the full observation set, point only.
  auto obj = point_objective(point, observations, k);
  if (!obj)
    return std::nullopt;  // seed already behind a camera
  constexpr int kMaxIter = 50;
  constexpr int kMaxBacktracks = 8;
  constexpr double kStepTol = 1e-10;
  for (int iter = 0; iter < kMaxIter; ++iter) {
    Mat3 jtj = Mat3::Zero();
    Vec3 jtr = Vec3::Zero();
    for (const auto& [obs, pose] : observations) {
      const auto jac = reprojection_jacobians(pose, k, point);
      const auto px = project(pose, k, point);
      if (!jac || !px) return std::nullopt;
      const Vec2 r = *px - obs.pixel;
      jtj += jac->point.transpose() * jac->point;
      jtr += jac->point.transpose() * r;
    }
    Eigen::FullPivLU<Mat3> lu(jtj);
    if (lu.rank() < 3)
      break;
    const Vec3 step = lu.solve(-jtr);
    if (step.norm() < kStepTol)
      break;
    double alpha = 1.0;
    bool accepted = false;
    for (int bt = 0; bt <= kMaxBacktracks; ++bt) {
      const Vec3 candidate = point + alpha * step;
      const auto cobj = point_objective(candidate, observations, k);
      if (cobj && *cobj <= *obj) {
        point = candidate;
        obj = cobj;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted)
      break;
  }

  for (const auto& [obs, pose] : observations) {
    if (pose.to_camera(point).z() <= kDepthEpsilon)
      return std::nullopt;
  }
  return point;
}

}  // namespace tubeloc::geom

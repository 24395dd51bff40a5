#include "geom/refine.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <stdexcept>

namespace tubeloc::geom {

namespace {

using Mat6 = Eigen::Matrix<double, 6, 6>;

std::optional<double> pose_objective(const Pose& pose,
                                     const std::vector<PointObservation>& active,
                                     const CameraIntrinsics& k) {
  double total = 0;
  for (const auto& m : active) {
    const auto px = project(pose, k, m.point);
    if (!px) return std::nullopt;
    total += (*px - m.pixel).squaredNorm();
  }
  return total;
}

}  // namespace

RefineResult refine_pose(const Pose& initial, const std::vector<PointObservation>& matches,
                         const CameraIntrinsics& k, const SolverConfig& config) {
  if (matches.size() < 4)
    throw std::invalid_argument("refine_pose: need >= 4 matches");

  std::vector<PointObservation> active;
  active.reserve(matches.size());
  for (const auto& m : matches)
    if (initial.to_camera(m.point).z() > kDepthEpsilon) active.push_back(m);

  RefineResult result;
  result.pose = initial;
  if (active.size() < 4) {
    result.status = RefineStatus::Singular;
    return result;
  }

  auto obj = pose_objective(initial, active, k);
  // Active matches are in front of the camera at the initial pose.
  result.objective_history.push_back(*obj);
  result.status = RefineStatus::MaxIterations;

  for (int iter = 0; iter < config.max_iterations; ++iter) {
    Mat6 jtj = Mat6::Zero();
    Twist jtr = Twist::Zero();
    for (const auto& m : active) {
      const auto jac = reprojection_jacobians(result.pose, k, m.point);
      const auto px = project(result.pose, k, m.point);
      const Vec2 r = *px - m.pixel;
      jtj += jac->pose.transpose() * jac->pose;
      jtr += jac->pose.transpose() * r;
    }
    Eigen::FullPivLU<Mat6> lu(jtj);
    if (lu.rank() < 6) {
      result.status = RefineStatus::Singular;
      break;
    }
    const Twist step = lu.solve(-jtr);
    if (step.norm() < config.step_tolerance) {
      result.status = RefineStatus::Converged;
      break;
    }
    double alpha = 1.0;
    bool accepted = false;
    for (int bt = 0; bt <= config.max_backtracks; ++bt) {
      const Pose candidate = exp_map(alpha * step) * result.pose;
      const auto cobj = pose_objective(candidate, active, k);
      if (cobj && *cobj <= *obj) {
        result.pose = candidate;
        obj = cobj;
        result.objective_history.push_back(*obj);
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      result.status = RefineStatus::Stalled;
      break;
    }
  }

  result.final_rms = std::sqrt(*obj / static_cast<double>(active.size()));
  return result;
}

}  // namespace tubeloc::geom

// Pose-only bundle adjustment: Gauss-Newton with left-multiplicative twist
// updates and step-halving backtracking.
#pragma once

#include <vector>

#include "geom/camera.hpp"

namespace tubeloc::geom {

struct PointObservation {
  Vec3 point = Vec3::Zero();  // world frame, mm
  Vec2 pixel = Vec2::Zero();  // observed, px
};

struct SolverConfig {
  int max_iterations = 50;
  double step_tolerance = 1e-8;
  int max_backtracks = 8;
};

enum class RefineStatus {
  Converged,        // step norm fell below tolerance
  MaxIterations,
  Stalled,          // backtracking could not reduce the objective
  Singular,         // rank-deficient normal equations or < 4 usable points;
                    // pose equals the initial estimate at the failure point
};

struct RefineResult {
  Pose pose;
  double final_rms = 0;  // sqrt(mean squared pixel error) over usable matches
  RefineStatus status = RefineStatus::MaxIterations;
  std::vector<double> objective_history;  // accepted objective values, non-increasing

  bool converged() const { return status == RefineStatus::Converged; }
};

// Minimizes the summed squared reprojection error over the 6-DoF pose,
// pose <- exp(delta) * pose. Matches behind the camera at the initial pose are
// excluded up front; a step that would put an active match behind the camera
// is rejected by the backtracking line search.
//
// Throws std::invalid_argument with fewer than 4 matches.
RefineResult refine_pose(const Pose& initial, const std::vector<PointObservation>& matches,
                         const CameraIntrinsics& k, const SolverConfig& config = {});

}  // namespace tubeloc::geom

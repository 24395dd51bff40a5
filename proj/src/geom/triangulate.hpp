// Multi-image point triangulation: two-view DLT seed, Gauss-Newton polish
// over all observations.
#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "geom/camera.hpp"

namespace tubeloc::geom {

// Condition-number bound on the DLT design matrix. Beyond it (or with a
// non-positive refined depth anywhere) the point is reported degenerate.
inline constexpr double kTriangulationConditionLimit = 1e12;

// Triangulates one point from >= 2 observations. Seeds with linear DLT on the
// widest-baseline pair, then minimizes the summed squared reprojection error
// over all observations (poses held fixed). Empty result signals degenerate
// geometry: parallel rays, zero baseline, or a behind-camera solution.
//
// Throws std::invalid_argument with fewer than 2 observations.
std::optional<Vec3> triangulate_point(
    const std::vector<std::pair<Observation2D, Pose>>& observations, const CameraIntrinsics& k);

}  // namespace tubeloc::geom

// Pinhole raycast renderer with headlight shading.
#pragma once

#include <optional>

#include "core/image.hpp"
#include "geom/camera.hpp"
#include "sim/world.hpp"

namespace tubeloc::sim {

// Renders the tube interior seen from a camera-to-world pose: per-pixel ray vs
// tube-surface intersection, shaded as texture x Lambertian with the light at
// the camera plus an inverse-square distance falloff. Deterministic.
//
// Throws std::domain_error when the camera is not inside the tube.
Image render(const TubeWorld& world, const geom::Pose& pose, const geom::CameraIntrinsics& k);

// Simulator-side pinhole projection, written independently of geom::project;
// the two paths cross-validate each other.
std::optional<geom::Vec2> project_point(const geom::Pose& pose, const geom::CameraIntrinsics& k,
                                        const geom::Vec3& world_point);

// The world-space ray through a (sub-)pixel; inverts project_point's mapping.
geom::Vec3 pixel_ray_direction(const geom::Pose& pose, const geom::CameraIntrinsics& k,
                               double px, double py);

}  // namespace tubeloc::sim

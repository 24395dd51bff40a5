#include "sim/render.hpp"

#include <cmath>
#include <stdexcept>

namespace tubeloc::sim {

namespace {
constexpr double kFalloffMm = 90.0;  // headlight attenuation scale
}

std::optional<geom::Vec2> project_point(const geom::Pose& pose, const geom::CameraIntrinsics& k,
                                        const geom::Vec3& world_point) {
  const geom::Mat3& r = pose.rotation.matrix();
  const geom::Vec3 d = world_point - pose.position;
  // Camera axes are the columns of R; camera coords are dot products with them.
  const double qx = r.col(0).dot(d);
  const double qy = r.col(1).dot(d);
  const double qz = r.col(2).dot(d);
  if (qz <= geom::kDepthEpsilon) return std::nullopt;
  return geom::Vec2(k.fx * qx / qz + k.cx, k.fy * qy / qz + k.cy);
}

geom::Vec3 pixel_ray_direction(const geom::Pose& pose, const geom::CameraIntrinsics& k,
                               double px, double py) {
  const geom::Mat3& r = pose.rotation.matrix();
  const geom::Vec3 d_cam((px - k.cx) / k.fx, (py - k.cy) / k.fy, 1.0);
  return (r * d_cam).normalized();
}

Image render(const TubeWorld& world, const geom::Pose& pose, const geom::CameraIntrinsics& k) {
  const double s_cam = world.nearest_arclength_global(pose.position);
  const auto c = world.centerline(s_cam);
  if ((pose.position - c.position).norm() >= c.radius)
    throw std::domain_error("render: camera pose outside the tube");

  Image img(k.width, k.height);
  for (int y = 0; y < k.height; ++y) {
    for (int x = 0; x < k.width; ++x) {
      const geom::Vec3 dir = pixel_ray_direction(pose, k, x, y);
      const RayHit hit = world.ray_cast(pose.position, dir, s_cam);
      double intensity = 0;
      if (hit.hit) {
        // The shading normal is the inward one (the ray arrives from inside)
        // and the light sits at the camera, so the light direction is -dir.
        const double lambert = std::max(0.0, hit.inward_normal.dot(-dir));
        const double falloff = 1.0 / (1.0 + (hit.t / kFalloffMm) * (hit.t / kFalloffMm));
        intensity = world.texture(hit.s, hit.theta) * lambert * falloff;
      }
      img.at(x, y) = static_cast<std::uint8_t>(std::lround(255.0 * std::clamp(intensity, 0.0, 1.0)));
    }
  }
  return img;
}

}  // namespace tubeloc::sim

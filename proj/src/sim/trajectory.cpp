#include "sim/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace tubeloc::sim {

namespace {

// Bounded AR(1) series in [-bound, bound]; smooth hand-held style wander.
std::vector<double> ar1_series(std::mt19937_64& rng, int n, double bound) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> out(n, 0.0);
  if (bound <= 0) return out;
  double x = 0;
  const double rho = 0.92;
  const double sigma = bound * 0.35;
  for (int i = 0; i < n; ++i) {
    x = std::clamp(rho * x + sigma * gauss(rng), -bound, bound);
    out[i] = x;
  }
  return out;
}

}  // namespace

std::vector<TimedPose> generate_trajectory(const TubeWorld& world, std::uint64_t seed,
                                           int n_frames, const TrajectoryProfile& profile) {
  if (n_frames < 2)
    throw std::invalid_argument("generate_trajectory: need >= 2 frames");

  auto rng = make_rng(mix_seed(seed, 0x7247));
  std::uniform_real_distribution<double> unit(-1.0, 1.0);

  const double s_lo = profile.end_margin_mm;
  const double s_hi = world.length() - profile.end_margin_mm;
  const double spacing = (s_hi - s_lo) / (n_frames - 1);

  std::vector<double> s_list(n_frames);
  for (int i = 0; i < n_frames; ++i) {
    const double jitter = profile.arclength_jitter * spacing * unit(rng);
    s_list[i] = std::clamp(s_lo + i * spacing + jitter, s_lo, s_hi);
  }
  std::sort(s_list.begin(), s_list.end());  // keep motion strictly forward

  const auto lat_a = ar1_series(rng, n_frames, profile.lateral_fraction);
  const auto lat_b = ar1_series(rng, n_frames, profile.lateral_fraction);
  const double ang_bound = profile.angle_deg * std::numbers::pi / 180.0;
  const auto rot_x = ar1_series(rng, n_frames, ang_bound);
  const auto rot_y = ar1_series(rng, n_frames, ang_bound);
  const auto rot_z = ar1_series(rng, n_frames, ang_bound);

  std::vector<TimedPose> out(n_frames);
  for (int i = 0; i < n_frames; ++i) {
    const auto c = world.centerline(s_list[i]);
    geom::Vec3 offset = lat_a[i] * c.radius * c.normal + lat_b[i] * c.radius * c.binormal;
    const double max_off = 0.8 * c.radius;
    if (offset.norm() > max_off) offset *= max_off / offset.norm();  // project back inside

    geom::Mat3 base;
    base.col(0) = c.normal;
    base.col(1) = c.binormal;
    base.col(2) = c.tangent;
    const geom::Rotation r =
        geom::Rotation::from_matrix_unchecked(base) *
        geom::Rotation::exp(geom::Vec3(rot_x[i], rot_y[i], rot_z[i]));

    out[i].pose = geom::Pose(r, c.position + offset);
    out[i].timestamp = i / profile.fps;
    out[i].arclength = s_list[i];
  }
  return out;
}

}  // namespace tubeloc::sim

// Scripted camera paths through the tube: forward motion along the centerline
// with bounded seeded lateral and angular jitter.
#pragma once

#include <cstdint>
#include <vector>

#include "sim/world.hpp"

namespace tubeloc::sim {

struct TrajectoryProfile {
  double lateral_fraction = 0.3;    // lateral offset bound, fraction of local radius
  double angle_deg = 5.0;           // orientation jitter bound
  double arclength_jitter = 0.4;    // per-frame jitter, fraction of frame spacing
  double end_margin_mm = 30.0;      // keep-out from the tube ends
  double fps = 30.0;

  static TrajectoryProfile train() { return {}; }
  static TrajectoryProfile test() {
    TrajectoryProfile p;
    p.lateral_fraction = 0.25;
    p.angle_deg = 4.0;
    return p;
  }
};

struct TimedPose {
  geom::Pose pose;
  double timestamp = 0;
  double arclength = 0;
};

// n_frames poses covering [margin, length - margin] in arclength order.
// Camera z looks along the tube tangent; the parallel-transported frame keeps
// roll bounded. Positions are projected back inside 0.8x the local radius.
// Zero jitter amplitudes put the camera exactly on the centerline.
//
// Throws std::invalid_argument when n_frames < 2.
std::vector<TimedPose> generate_trajectory(const TubeWorld& world, std::uint64_t seed,
                                           int n_frames, const TrajectoryProfile& profile);

}  // namespace tubeloc::sim

// Triangulated 3D landmark with its matching descriptor and zone provenance.
#pragma once

#include "features/types.hpp"
#include "geom/se3.hpp"

namespace tubeloc::geom {

struct MapPoint {
  Vec3 position = Vec3::Zero();     // world frame, mm
  features::Descriptor descriptor;  // from the first observation of the source track
  int zone_id = -1;
  double max_reproj_error = 0;      // max over source frames, px; <= delta_r by construction
};

}  // namespace tubeloc::geom

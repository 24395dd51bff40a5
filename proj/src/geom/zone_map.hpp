// Per-zone landmark map construction from tracked features, plus the columnar
// zone-map file format.
#pragma once

#include <string>
#include <vector>

#include "features/matching.hpp"
#include "geom/map_point.hpp"
#include "geom/triangulate.hpp"

namespace tubeloc::geom {

struct ZoneMapBuild {
  std::vector<MapPoint> points;
  // Per-point source observations, parallel to `points` (audit trail for the
  // delta_r guarantee).
  std::vector<std::vector<Observation2D>> provenance;
};

// Matches descriptors across the frames into tracks, triangulates every track
// with >= 2 observations against the fixed training poses, and keeps only
// points whose maximum reprojection error over their source frames is within
// delta_r. Deterministic: output follows track order.
//
// poses[i] belongs to frames[i]. Throws std::invalid_argument with fewer than
// 3 frames or mismatched sizes. An all-filtered result is an empty map, not an
// error; callers mark such zones refinement-unavailable.
ZoneMapBuild build_zone_map(const std::vector<features::FrameFeatures>& frames,
                            const std::vector<Pose>& poses, const CameraIntrinsics& k,
                            double delta_r, int zone_id, double match_ratio = 0.8);

// Columnar text format, one file per zone:
//   header: zone_id n_points descriptor_len delta_r
//   rows:   x y z max_err d_0 ... d_{k-1}
// Floats at 9 significant digits; write -> read -> write is byte-identical.
struct ZoneMapFile {
  int zone_id = -1;
  double delta_r = 0;
  std::vector<MapPoint> points;
};

void write_zone_map(const std::string& path, int zone_id, double delta_r,
                    const std::vector<MapPoint>& points);
ZoneMapFile read_zone_map(const std::string& path);

}  // namespace tubeloc::geom

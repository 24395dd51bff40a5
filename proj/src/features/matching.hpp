// Descriptor matching: mutual nearest neighbors with the Lowe ratio test.
#pragma once

#include <vector>

#include "features/types.hpp"
#include "geom/camera.hpp"
#include "geom/map_point.hpp"

namespace tubeloc::features {

// One-to-one matches (index_a, index_b), mutual nearest neighbors passing the
// ratio test on both sides. Symmetric: match(a, b) equals the index-swapped
// match(b, a). Requires 0 < ratio < 1.
std::vector<std::pair<int, int>> match_descriptors(const FrameFeatures& a, const FrameFeatures& b,
                                                   double ratio);

// Chains pairwise matches between consecutive frames into tracks. A track's
// descriptor is its first observation's. Tracks claiming an already-claimed
// keypoint are dropped (both of them). Requires >= 2 frames.
std::vector<Track> match_tracks(const std::vector<FrameFeatures>& frames, double ratio);

struct MapMatch {
  geom::MapPoint point;
  geom::Observation2D observation;
};

// Matches map-point descriptors against a frame; same mutual + ratio rule,
// one-to-one in both directions. Requires a non-empty map.
std::vector<MapMatch> match_to_map(const FrameFeatures& frame,
                                   const std::vector<geom::MapPoint>& map, double ratio);

}  // namespace tubeloc::features

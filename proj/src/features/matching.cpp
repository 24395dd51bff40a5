#include "features/matching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace tubeloc::features {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct NearestInfo {
  int nearest = -1;
  double d1 = kInf;  // squared distance to nearest
  double d2 = kInf;  // squared distance to second nearest
};

// Nearest and second-nearest of each query in targets; ties keep the lowest index.
std::vector<NearestInfo> nearest_neighbors(const std::vector<Descriptor>& queries,
                                           const std::vector<Descriptor>& targets) {
  std::vector<NearestInfo> out(queries.size());
  for (std::size_t i = 0; i < queries.size(); ++i) {
    NearestInfo info;
    for (std::size_t j = 0; j < targets.size(); ++j) {
      const double d = (queries[i] - targets[j]).squaredNorm();
      if (d < info.d1) {
        info.d2 = info.d1;
        info.d1 = d;
        info.nearest = static_cast<int>(j);
      } else if (d < info.d2) {
        info.d2 = d;
      }
    }
    out[i] = info;
  }
  return out;
}

bool passes_ratio(const NearestInfo& n, double ratio_sq) {
  if (n.nearest < 0) return false;
  if (n.d2 == kInf) return true;  // single candidate: unambiguous
  return n.d1 < ratio_sq * n.d2;
}

std::vector<std::pair<int, int>> match_descriptor_sets(const std::vector<Descriptor>& a,
                                                       const std::vector<Descriptor>& b,
                                                       double ratio) {
  if (ratio <= 0.0 || ratio >= 1.0)
    throw std::invalid_argument("match: ratio must be in (0, 1)");
  const double ratio_sq = ratio * ratio;
  const auto fwd = nearest_neighbors(a, b);
  const auto bwd = nearest_neighbors(b, a);
  std::vector<std::pair<int, int>> matches;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const int j = fwd[i].nearest;
    if (j < 0 || bwd[j].nearest != static_cast<int>(i)) continue;
    if (!passes_ratio(fwd[i], ratio_sq) || !passes_ratio(bwd[j], ratio_sq)) continue;
    matches.emplace_back(static_cast<int>(i), j);
  }
  return matches;
}

}  // namespace

std::vector<std::pair<int, int>> match_descriptors(const FrameFeatures& a, const FrameFeatures& b,
                                                   double ratio) {
  return match_descriptor_sets(a.descriptors, b.descriptors, ratio);
}

std::vector<Track> match_tracks(const std::vector<FrameFeatures>& frames, double ratio) {
  if (frames.size() < 2)
    throw std::invalid_argument("match_tracks: need >= 2 frames");

  struct Building {
    std::vector<std::pair<int, int>> obs;  // (frame position, keypoint index)
    bool dead = false;
  };
  std::vector<Building> tracks;
  // (frame position, keypoint index) -> track id, for every claimed keypoint.
  std::map<std::pair<int, int>, int> claimed;

  for (std::size_t f = 0; f + 1 < frames.size(); ++f) {
    const auto matches = match_descriptors(frames[f], frames[f + 1], ratio);
    for (const auto& [i, j] : matches) {
      const auto key_cur = std::make_pair(static_cast<int>(f), i);
      const auto key_next = std::make_pair(static_cast<int>(f + 1), j);
      int track_id;
      auto it = claimed.find(key_cur);
      if (it != claimed.end() && tracks[it->second].obs.back() == key_cur) {
        track_id = it->second;  // extend the chain
      } else if (it != claimed.end()) {
        continue;  // keypoint already mid-track; cannot start another chain from it
      } else {
        track_id = static_cast<int>(tracks.size());
        tracks.push_back({});
        tracks[track_id].obs.push_back(key_cur);
        claimed[key_cur] = track_id;
      }
      auto next_it = claimed.find(key_next);
      if (next_it != claimed.end()) {
        // Conflicting chains: drop both claimants.
        tracks[next_it->second].dead = true;
        tracks[track_id].dead = true;
        continue;
      }
      tracks[track_id].obs.push_back(key_next);
      claimed[key_next] = track_id;
    }
  }

  std::vector<Track> out;
  for (const auto& t : tracks) {
    if (t.dead || t.obs.size() < 2) continue;
    Track track;
    track.observations.reserve(t.obs.size());
    for (const auto& [fpos, kidx] : t.obs)
      track.observations.emplace_back(frames[fpos].image_index, kidx);
    const auto& [f0, k0] = t.obs.front();
    track.descriptor = frames[f0].descriptors[k0];
    out.push_back(std::move(track));
  }
  std::sort(out.begin(), out.end(), [](const Track& a, const Track& b) {
    return a.observations.front() < b.observations.front();
  });
  return out;
}

std::vector<MapMatch> match_to_map(const FrameFeatures& frame,
                                   const std::vector<geom::MapPoint>& map, double ratio) {
  if (map.empty())
    throw std::invalid_argument("match_to_map: empty map");
  std::vector<Descriptor> map_desc;
  map_desc.reserve(map.size());
  for (const auto& mp : map) map_desc.push_back(mp.descriptor);
  const auto matches = match_descriptor_sets(map_desc, frame.descriptors, ratio);
  std::vector<MapMatch> out;
  out.reserve(matches.size());
  for (const auto& [mi, ki] : matches) {
    MapMatch mm;
    mm.point = map[mi];
    mm.observation.pixel = frame.keypoints[ki].pixel;
    mm.observation.image_index = frame.image_index;
    out.push_back(std::move(mm));
  }
  return out;
}

}  // namespace tubeloc::features

#include "zones/localize.hpp"

#include <stdexcept>

#include "features/matching.hpp"

namespace tubeloc::zones {

const char* to_string(LocalizeStatus status) {
  switch (status) {
    case LocalizeStatus::Refined: return "refined";
    case LocalizeStatus::ClassificationOnly: return "classification_only";
    case LocalizeStatus::Rejected: return "rejected";
  }
  return "unknown";
}

LocalizationResult localize_in_zone(const Image& image, int zone_id,
                                    const ZonePartition& partition,
                                    const geom::CameraIntrinsics& k,
                                    const LocalizeConfig& config) {
  if (zone_id < 0 || zone_id >= static_cast<int>(partition.zones.size()))
    throw std::invalid_argument("localize_in_zone: zone_id out of range");
  const Zone& zone = partition.zones[zone_id];

  LocalizationResult result;
  result.zone_id = zone_id;
  result.initial_pose = zone.median_pose;
  result.status = LocalizeStatus::ClassificationOnly;
  if (!config.refinement_enabled || zone.map.empty())
    return result;

  const auto frame = features::detect_and_describe(image, config.detector, -1);
  const auto matches = features::match_to_map(frame, zone.map, config.detector.ratio);

  std::vector<geom::PointObservation> obs;
  obs.reserve(matches.size());
  for (const auto& m : matches) {
    if (config.match_gate_px > 0) {
      const auto px = geom::project(zone.median_pose, k, m.point.position);
      if (!px || (*px - m.observation.pixel).norm() > config.match_gate_px) continue;
    }
    obs.push_back({m.point.position, m.observation.pixel});
  }
  result.n_matches = static_cast<int>(obs.size());
  if (result.n_matches < config.min_matches)
    return result;

  auto refined = geom::refine_pose(zone.median_pose, obs, k, config.solver);
  if (config.refine_trim_px > 0 && refined.status != geom::RefineStatus::Singular) {
    std::vector<geom::PointObservation> kept;
    kept.reserve(obs.size());
    for (const auto& o : obs) {
      const auto px = geom::project(refined.pose, k, o.point);
      if (px && (*px - o.pixel).norm() <= config.refine_trim_px) kept.push_back(o);
    }
    if (static_cast<int>(kept.size()) >= config.min_matches && kept.size() < obs.size())
      refined = geom::refine_pose(zone.median_pose, kept, k, config.solver);
  }
  if (refined.status == geom::RefineStatus::Singular)
    return result;  // degenerate geometry: keep the median pose

  result.final_rms = refined.final_rms;
  const double jump = (refined.pose.position - zone.median_pose.position).norm();
  if (refined.final_rms > config.max_rms || jump > config.max_jump_factor * zone.pose_diameter) {
    result.status = LocalizeStatus::Rejected;
    return result;
  }
  result.status = LocalizeStatus::Refined;
  result.refined_pose = refined.pose;
  return result;
}

LocalizationResult localize(const Image& image, const classifier::EmbedModel& model,
                            const classifier::DescriptorDB& db, const ZonePartition& partition,
                            const geom::CameraIntrinsics& k, const LocalizeConfig& config) {
  const auto cls = classifier::classify(model, db, image);
  LocalizationResult result = localize_in_zone(image, cls.zone_id, partition, k, config);
  result.classify_distance = cls.distance;
  return result;
}

}  // namespace tubeloc::zones

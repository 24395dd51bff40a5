// Single-image localization: zone classification, median-pose initialization,
// map registration, pose refinement, and the post-refinement validity filter.
#pragma once

#include <optional>

#include "classifier/db.hpp"
#include "geom/refine.hpp"
#include "zones/partition.hpp"

namespace tubeloc::zones {

enum class LocalizeStatus { Refined, ClassificationOnly, Rejected };

const char* to_string(LocalizeStatus status);

struct LocalizeConfig {
  features::DetectorParams detector;
  geom::SolverConfig solver;
  double max_rms = 10.0;         // reject refinements with final RMS above this, px
  double max_jump_factor = 2.0;  // reject jumps beyond factor x zone pose diameter
  int min_matches = 4;
  bool refinement_enabled = true;
  // Registration gate: drop map matches whose observed pixel lies farther than
  // this from the point's projection through the initial (median) pose.
  // 0 disables the gate.
  double match_gate_px = 0.0;
  // One residual-trimmed refit: after the first refinement, matches with
  // reprojection residuals above this are dropped and the pose is re-refined
  // from the initial estimate. 0 disables the refit.
  double refine_trim_px = 0.0;
};

struct LocalizationResult {
  int zone_id = -1;
  geom::Pose initial_pose;                  // classified zone's median pose
  std::optional<geom::Pose> refined_pose;   // present iff status == Refined
  double final_rms = 0;
  int n_matches = 0;
  double classify_distance = 0;
  LocalizeStatus status = LocalizeStatus::ClassificationOnly;

  const geom::Pose& best_pose() const { return refined_pose ? *refined_pose : initial_pose; }
};

// The geometric half, entered at a known zone (the perturbation study feeds
// shifted zone ids through here). Falls back to classification-only when the
// zone map is empty, matches are scarce, or the normal equations degenerate;
// refinements violating the RMS or position-jump bound are rejected and the
// refined pose is withheld.
LocalizationResult localize_in_zone(const Image& image, int zone_id,
                                    const ZonePartition& partition,
                                    const geom::CameraIntrinsics& k, const LocalizeConfig& config);

// Full pipeline for one image: classify, then localize_in_zone.
LocalizationResult localize(const Image& image, const classifier::EmbedModel& model,
                            const classifier::DescriptorDB& db, const ZonePartition& partition,
                            const geom::CameraIntrinsics& k, const LocalizeConfig& config);

}  // namespace tubeloc::zones

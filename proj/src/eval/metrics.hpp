// Pose error metrics and per-run error reports.
#pragma once

#include <optional>
#include <vector>

#include "geom/se3.hpp"
#include "zones/localize.hpp"

namespace tubeloc::eval {

struct PoseError {
  double position_mm = 0;
  double orientation_deg = 0;  // geodesic angle, [0, 180]
};

// Euclidean position distance plus the geodesic angle of R_est * R_truth^T
// (trace formula, clamped before acos).
PoseError pose_errors(const geom::Pose& estimate, const geom::Pose& truth);

struct Aggregates {
  double mean = 0, median = 0, q1 = 0, q3 = 0, min = 0, max = 0;
  int count = 0;
};

// Quartiles by linear interpolation at (n-1)p.
Aggregates aggregate(std::vector<double> values);

struct PerImageResult {
  int index = -1;
  zones::LocalizeStatus status = zones::LocalizeStatus::ClassificationOnly;
  int zone_id = -1;
  int n_matches = 0;
  double rms = 0;
  PoseError classification_only;          // median pose of the predicted zone vs truth
  std::optional<PoseError> refined;       // present iff status == Refined
  PoseError headline;                     // refined when present, else classification_only
  geom::Pose estimate;                    // the headline pose
};

// Rejected and classification-only rows fall back to the classification-only
// error inside the headline aggregates; the refined aggregates cover the
// refined subset alone.
struct ErrorReport {
  std::vector<PerImageResult> rows;
  int n_refined = 0, n_classification_only = 0, n_rejected = 0;
  Aggregates headline_pos, headline_ori;
  Aggregates classonly_pos, classonly_ori;
  Aggregates refined_pos, refined_ori;  // count 0 when nothing refined
};

ErrorReport make_report(std::vector<PerImageResult> rows);

}  // namespace tubeloc::eval

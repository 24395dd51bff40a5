#include "eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace tubeloc::eval {

PoseError pose_errors(const geom::Pose& estimate, const geom::Pose& truth) {
  PoseError e;
  e.position_mm = (estimate.position - truth.position).norm();
  e.orientation_deg = estimate.rotation.angle_to(truth.rotation) * 180.0 / std::numbers::pi;
  return e;
}

Aggregates aggregate(std::vector<double> values) {
  Aggregates a;
  a.count = static_cast<int>(values.size());
  if (values.empty()) return a;
  std::sort(values.begin(), values.end());
  double sum = 0;
  for (double v : values) sum += v;
  a.mean = sum / values.size();
  a.min = values.front();
  a.max = values.back();
  auto quantile = [&](double p) {
    const double pos = p * (values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double f = pos - lo;
    return (1 - f) * values[lo] + f * values[hi];
  };
  a.q1 = quantile(0.25);
  a.median = quantile(0.5);
  a.q3 = quantile(0.75);
  return a;
}

ErrorReport make_report(std::vector<PerImageResult> rows) {
  ErrorReport r;
  r.rows = std::move(rows);
  std::vector<double> hp, ho, cp, co, rp, ro;
  for (const auto& row : r.rows) {
    hp.push_back(row.headline.position_mm);
    ho.push_back(row.headline.orientation_deg);
    cp.push_back(row.classification_only.position_mm);
    co.push_back(row.classification_only.orientation_deg);
    switch (row.status) {
      case zones::LocalizeStatus::Refined:
        ++r.n_refined;
        if (!row.refined)
          throw std::logic_error("make_report: refined row without refined error");
        rp.push_back(row.refined->position_mm);
        ro.push_back(row.refined->orientation_deg);
        break;
      case zones::LocalizeStatus::ClassificationOnly: ++r.n_classification_only; break;
      case zones::LocalizeStatus::Rejected: ++r.n_rejected; break;
    }
  }
  r.headline_pos = aggregate(std::move(hp));
  r.headline_ori = aggregate(std::move(ho));
  r.classonly_pos = aggregate(std::move(cp));
  r.classonly_ori = aggregate(std::move(co));
  r.refined_pos = aggregate(std::move(rp));
  r.refined_ori = aggregate(std::move(ro));
  return r;
}

}  // namespace tubeloc::eval

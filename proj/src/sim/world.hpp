// Procedural tube world: a smooth curved tube with a seeded texture field,
// anatomical-analog sections, and designated low-texture stretches.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "geom/se3.hpp"
#include "sim/noise.hpp"

namespace tubeloc::sim {

struct WorldConfig {
  double length_mm = 1500.0;
  double radius_mm = 20.0;
  int sections = 13;
  int low_texture_sections = 2;   // texture amplitude scaled by 0.05 in these
  int control_points = 16;
  double segment_mm = 100.0;      // control polyline segment length
  double texture_scale_mm = 8.0;  // base noise wavelength on the surface
  double band_wavelength_mm = 11.0;
};

struct SectionInfo {
  double s_begin = 0, s_end = 0;  // arclength range, mm
  std::string name;
  double texture_amplitude = 1.0;
};

struct CenterlineSample {
  geom::Vec3 position;
  geom::Vec3 tangent;
  geom::Vec3 normal;    // parallel-transported frame
  geom::Vec3 binormal;
  double radius = 0;
};

struct RayHit {
  bool hit = false;
  geom::Vec3 point = geom::Vec3::Zero();
  geom::Vec3 inward_normal = geom::Vec3::Zero();
  double s = 0;      // arclength of the nearest centerline point
  double theta = 0;  // angle of the radial direction in the (normal, binormal) frame
  double t = 0;      // ray parameter, mm
};

class TubeWorld {
 public:
  // Deterministic from (seed, config). Throws std::invalid_argument on
  // non-positive lengths/radii or section counts that do not fit.
  static TubeWorld generate(std::uint64_t seed, const WorldConfig& config = {});

  double length() const { return config_.length_mm; }
  std::uint64_t seed() const { return seed_; }
  const WorldConfig& config() const { return config_; }
  const std::vector<SectionInfo>& sections() const { return sections_; }
  const SectionInfo& section_at(double s) const;

  CenterlineSample centerline(double s) const;
  double radius(double s) const;
  double texture(double s, double theta) const;
  geom::Vec3 surface_point(double s, double theta) const;

  // Nearest arclength to a world point; `hint` seeds the local search.
  double nearest_arclength(const geom::Vec3& p, double hint) const;
  double nearest_arclength_global(const geom::Vec3& p) const;

  // First tube-surface crossing along origin + t * dir (sphere tracing against
  // the local radius, 0.01 mm tolerance). s_hint seeds the arclength tracking.
  RayHit ray_cast(const geom::Vec3& origin, const geom::Vec3& dir, double s_hint) const;

  // FNV-1a over a quantized texture grid sample; equal for identical worlds.
  std::uint64_t texture_grid_hash(int n_s = 64, int n_theta = 32) const;

 private:
  WorldConfig config_;
  std::uint64_t seed_ = 0;
  ValueNoise3 noise_{0};
  std::vector<SectionInfo> sections_;
  double band_phase_ = 0;
  double radius_phase1_ = 0, radius_phase2_ = 0;

  // Uniform-arclength lookup table, step step_mm_.
  double step_mm_ = 1.0;
  std::vector<geom::Vec3> lut_pos_, lut_tan_, lut_nrm_, lut_bin_;

  CenterlineSample sample_at_index(int i) const;
};

}  // namespace tubeloc::sim

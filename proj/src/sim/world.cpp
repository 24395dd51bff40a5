#include "sim/world.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace tubeloc::sim {

namespace {

constexpr double kPi = std::numbers::pi;

geom::Vec3 catmull_rom(const geom::Vec3& p0, const geom::Vec3& p1, const geom::Vec3& p2,
                       const geom::Vec3& p3, double t) {
  const double t2 = t * t, t3 = t2 * t;
  return 0.5 * ((2.0 * p1) + (-p0 + p2) * t + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * t2 +
                (-p0 + 3.0 * p1 - 3.0 * p2 + p3) * t3);
}

const char* kSectionNames[13] = {
    "anal_canal",       "rectum",          "rectosigmoid_junction", "sigmoid_colon",
    "sigmoid_flexure",  "descending_colon", "splenic_flexure",       "transverse_colon",
    "hepatic_flexure",  "ascending_colon",  "ileocecal_valve",       "cecum",
    "appendix"};

}  // namespace

TubeWorld TubeWorld::generate(std::uint64_t seed, const WorldConfig& config) {
  if (config.length_mm <= 0 || config.radius_mm <= 0 || config.sections < 1 ||
      config.low_texture_sections < 0 || config.low_texture_sections > config.sections ||
      config.control_points < 4 || config.segment_mm <= 0)
    throw std::invalid_argument("TubeWorld: invalid config");

  TubeWorld w;
  w.config_ = config;
  w.seed_ = seed;
  w.noise_ = ValueNoise3(mix_seed(seed, 0xA11CE));
  auto rng = make_rng(mix_seed(seed, 0x70B3));
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  w.band_phase_ = 2 * kPi * unit(rng);
  w.radius_phase1_ = 2 * kPi * unit(rng);
  w.radius_phase2_ = 2 * kPi * unit(rng);

  // Control polyline: bounded-heading random walk, mostly +x. The heading
  // clamp keeps x monotone so the centerline cannot approach itself.
  std::vector<geom::Vec3> ctrl;
  ctrl.push_back(geom::Vec3::Zero());
  double yaw = 0, pitch = 0;
  const double max_angle = 22.0 * kPi / 180.0;
  for (int i = 1; i < config.control_points; ++i) {
    yaw = std::clamp(0.82 * yaw + 0.14 * gauss(rng), -max_angle, max_angle);
    pitch = std::clamp(0.82 * pitch + 0.10 * gauss(rng), -max_angle, max_angle);
    const geom::Vec3 dir(std::cos(pitch) * std::cos(yaw), std::cos(pitch) * std::sin(yaw),
                         std::sin(pitch));
    ctrl.push_back(ctrl.back() + config.segment_mm * dir);
  }
  // Phantom endpoints for the spline.
  std::vector<geom::Vec3> pts;
  pts.push_back(2.0 * ctrl.front() - ctrl[1]);
  pts.insert(pts.end(), ctrl.begin(), ctrl.end());
  pts.push_back(2.0 * ctrl.back() - ctrl[ctrl.size() - 2]);

  // Dense parameter sampling, then cumulative arclength.
  const int per_segment = 64;
  std::vector<geom::Vec3> fine;
  for (std::size_t s = 0; s + 3 < pts.size(); ++s)
    for (int j = 0; j < per_segment; ++j)
      fine.push_back(catmull_rom(pts[s], pts[s + 1], pts[s + 2], pts[s + 3],
                                 double(j) / per_segment));
  fine.push_back(ctrl.back());
  std::vector<double> cum(fine.size(), 0.0);
  for (std::size_t i = 1; i < fine.size(); ++i)
    cum[i] = cum[i - 1] + (fine[i] - fine[i - 1]).norm();
  const double total = cum.back();

  // Rescale so the curve length is exactly the configured length, then
  // resample at uniform arclength.
  const double scale = config.length_mm / total;
  for (auto& p : fine) p *= scale;
  for (auto& c : cum) c *= scale;

  const int n_lut = static_cast<int>(std::ceil(config.length_mm / w.step_mm_)) + 1;
  w.lut_pos_.resize(n_lut);
  std::size_t k = 0;
  for (int i = 0; i < n_lut; ++i) {
    const double s = std::min(double(i) * w.step_mm_, config.length_mm);
    while (k + 1 < cum.size() && cum[k + 1] < s) ++k;
    const double seg = cum[k + 1] - cum[k];
    const double f = seg > 0 ? (s - cum[k]) / seg : 0.0;
    w.lut_pos_[i] = (1 - f) * fine[k] + f * fine[k + 1];
  }

  // Tangents by central differences, then a parallel-transported frame.
  w.lut_tan_.resize(n_lut);
  for (int i = 0; i < n_lut; ++i) {
    const int a = std::max(i - 1, 0), b = std::min(i + 1, n_lut - 1);
    w.lut_tan_[i] = (w.lut_pos_[b] - w.lut_pos_[a]).normalized();
  }
  w.lut_nrm_.resize(n_lut);
  w.lut_bin_.resize(n_lut);
  geom::Vec3 ref = geom::Vec3::UnitY();
  if (std::abs(ref.dot(w.lut_tan_[0])) > 0.9) ref = geom::Vec3::UnitZ();
  w.lut_nrm_[0] = (ref - ref.dot(w.lut_tan_[0]) * w.lut_tan_[0]).normalized();
  w.lut_bin_[0] = w.lut_tan_[0].cross(w.lut_nrm_[0]);
  for (int i = 1; i < n_lut; ++i) {
    const geom::Vec3& t = w.lut_tan_[i];
    geom::Vec3 n = w.lut_nrm_[i - 1] - w.lut_nrm_[i - 1].dot(t) * t;
    if (n.squaredNorm() < 1e-12) n = w.lut_bin_[i - 1].cross(t);
    w.lut_nrm_[i] = n.normalized();
    w.lut_bin_[i] = t.cross(w.lut_nrm_[i]);
  }

  // Sections: seeded proportional spans along the arclength.
  std::vector<double> weights(config.sections);
  double wsum = 0;
  for (auto& v : weights) {
    v = 0.7 + 0.6 * unit(rng);
    wsum += v;
  }
  double s0 = 0;
  for (int i = 0; i < config.sections; ++i) {
    SectionInfo sec;
    sec.s_begin = s0;
    s0 += weights[i] / wsum * config.length_mm;
    sec.s_end = (i == config.sections - 1) ? config.length_mm : s0;
    sec.name = i < 13 ? kSectionNames[i] : ("section_" + std::to_string(i));
    w.sections_.push_back(sec);
  }
  // Low-texture sections: drawn from the interior so the tube ends stay usable.
  if (config.low_texture_sections > 0 && config.sections > 2) {
    std::vector<int> interior;
    for (int i = 1; i + 1 < config.sections; ++i) interior.push_back(i);
    std::shuffle(interior.begin(), interior.end(), rng);
    const int n_low = std::min<int>(config.low_texture_sections, interior.size());
    for (int i = 0; i < n_low; ++i) w.sections_[interior[i]].texture_amplitude = 0.05;
  }

  // Self-intersection guard: distant arclengths must stay far apart.
  const double min_gap = 3.0 * config.radius_mm;
  for (int i = 0; i < n_lut; i += 5)
    for (int j = i + static_cast<int>(2 * min_gap / w.step_mm_); j < n_lut; j += 5)
      if ((w.lut_pos_[i] - w.lut_pos_[j]).norm() < min_gap)
        throw std::invalid_argument("TubeWorld: centerline self-intersects for this config");

  return w;
}

CenterlineSample TubeWorld::sample_at_index(int i) const {
  CenterlineSample c;
  c.position = lut_pos_[i];
  c.tangent = lut_tan_[i];
  c.normal = lut_nrm_[i];
  c.binormal = lut_bin_[i];
  return c;
}

CenterlineSample TubeWorld::centerline(double s) const {
  s = std::clamp(s, 0.0, config_.length_mm);
  const int n = static_cast<int>(lut_pos_.size());
  const double fi = s / step_mm_;
  const int i0 = std::min(static_cast<int>(fi), n - 1);
  const int i1 = std::min(i0 + 1, n - 1);
  const double f = std::clamp(fi - i0, 0.0, 1.0);
  CenterlineSample c;
  c.position = (1 - f) * lut_pos_[i0] + f * lut_pos_[i1];
  c.tangent = ((1 - f) * lut_tan_[i0] + f * lut_tan_[i1]).normalized();
  geom::Vec3 nrm = (1 - f) * lut_nrm_[i0] + f * lut_nrm_[i1];
  nrm -= nrm.dot(c.tangent) * c.tangent;
  c.normal = nrm.normalized();
  c.binormal = c.tangent.cross(c.normal);
  c.radius = radius(s);
  return c;
}

double TubeWorld::radius(double s) const {
  const double r = config_.radius_mm *
                   (1.0 + 0.12 * std::sin(2 * kPi * s / 350.0 + radius_phase1_) +
                    0.08 * std::sin(2 * kPi * s / 130.0 + radius_phase2_));
  return r;
}

const SectionInfo& TubeWorld::section_at(double s) const {
  s = std::clamp(s, 0.0, config_.length_mm);
  for (const auto& sec : sections_)
    if (s < sec.s_end || &sec == &sections_.back()) return sec;
  return sections_.back();
}

namespace {

// Per-section texture signature; sections look visibly different from each
// other (the anatomy-analog property the zone classifier keys on) while one
// section stays coherent. Per-image standardization removes brightness and
// contrast, so the signature lives in the spatial structure.
struct TextureStyle {
  double noise_mix;    // fine vs coarse noise blend
  double band_mix;     // ring-like vs oblique band blend
  double band_twist;   // angular rate of the oblique bands
  double band_scale;   // wavelength multiplier
};

TextureStyle section_style(std::uint64_t seed, int section_index) {
  auto bits = [&](int salt) {
    return static_cast<double>(mix_seed(seed, 0x5EC710, section_index * 16 + salt) >> 11) *
           (1.0 / 9007199254740992.0);
  };
  TextureStyle st;
  st.noise_mix = 0.15 + 0.7 * bits(0);
  st.band_mix = 0.15 + 0.7 * bits(1);
  st.band_twist = 1.0 + 4.0 * bits(2);
  st.band_scale = 0.7 + 0.9 * bits(3);
  return st;
}

}  // namespace

double TubeWorld::texture(double s, double theta) const {
  const SectionInfo& sec = section_at(s);
  const double amp = sec.texture_amplitude;
  const double rho = 1.9;  // cylinder embedding radius, noise-lattice units
  const double cs = std::cos(theta), sn = std::sin(theta);

  int sec_index = 0;
  for (std::size_t i = 0; i < sections_.size(); ++i)
    if (&sections_[i] == &sec) sec_index = static_cast<int>(i);

  // Blend the neighbor's style inside an 8 mm transition band at the seams.
  TextureStyle st = section_style(seed_, sec_index);
  const double kBlend = 8.0;
  double w_self = 1.0;
  TextureStyle other = st;
  if (s - sec.s_begin < kBlend && sec_index > 0) {
    other = section_style(seed_, sec_index - 1);
    w_self = 0.5 + 0.5 * (s - sec.s_begin) / kBlend;
  } else if (sec.s_end - s < kBlend && sec_index + 1 < static_cast<int>(sections_.size())) {
    other = section_style(seed_, sec_index + 1);
    w_self = 0.5 + 0.5 * (sec.s_end - s) / kBlend;
  }
  auto lerp = [&](double a, double b) { return w_self * a + (1.0 - w_self) * b; };
  const double noise_mix = lerp(st.noise_mix, other.noise_mix);
  const double band_mix = lerp(st.band_mix, other.band_mix);
  const double band_twist = lerp(st.band_twist, other.band_twist);
  const double band_scale = lerp(st.band_scale, other.band_scale);

  const double fine = noise_.fbm(
      Eigen::Vector3d(s / config_.texture_scale_mm, rho * cs, rho * sn), 4);
  const double coarse = noise_.fbm(
      Eigen::Vector3d(s / (2.6 * config_.texture_scale_mm) + 311.7, 0.8 * rho * cs,
                      0.8 * rho * sn), 3);
  const double n = noise_mix * (2.0 * fine - 1.0) + (1.0 - noise_mix) * (2.0 * coarse - 1.0);

  const double lambda = band_scale * config_.band_wavelength_mm;
  const double band1 = std::sin(2 * kPi * s / lambda + band_phase_ + 2.0 * sn);
  const double band2 =
      std::sin(2 * kPi * s / (1.9 * lambda) + 2.2 * band_phase_ + band_twist * theta);
  const double b = band_mix * band1 + (1.0 - band_mix) * band2;

  const double v = 0.55 + amp * (0.34 * n + 0.13 * b);
  return std::clamp(v, 0.02, 1.0);
}

geom::Vec3 TubeWorld::surface_point(double s, double theta) const {
  const CenterlineSample c = centerline(s);
  return c.position + c.radius * (std::cos(theta) * c.normal + std::sin(theta) * c.binormal);
}

double TubeWorld::nearest_arclength(const geom::Vec3& p, double hint) const {
  const int n = static_cast<int>(lut_pos_.size());
  int i = std::clamp(static_cast<int>(std::round(hint / step_mm_)), 0, n - 1);
  auto d2 = [&](int idx) { return (p - lut_pos_[idx]).squaredNorm(); };
  // Integer descent on the LUT.
  for (int guard = 0; guard < n; ++guard) {
    const double here = d2(i);
    if (i > 0 && d2(i - 1) < here) {
      --i;
    } else if (i + 1 < n && d2(i + 1) < here) {
      ++i;
    } else {
      break;
    }
  }
  // Sub-sample refinement along the local tangent.
  const double offset = std::clamp((p - lut_pos_[i]).dot(lut_tan_[i]), -step_mm_, step_mm_);
  return std::clamp(i * step_mm_ + offset, 0.0, config_.length_mm);
}

double TubeWorld::nearest_arclength_global(const geom::Vec3& p) const {
  const int n = static_cast<int>(lut_pos_.size());
  int best = 0;
  double best_d = (p - lut_pos_[0]).squaredNorm();
  for (int i = 1; i < n; ++i) {
    const double d = (p - lut_pos_[i]).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return nearest_arclength(p, best * step_mm_);
}

RayHit TubeWorld::ray_cast(const geom::Vec3& origin, const geom::Vec3& dir, double s_hint) const {
  constexpr double kTol = 0.01;      // surface tolerance, mm
  constexpr double kMaxT = 500.0;    // ray cap, mm
  constexpr int kMaxSteps = 400;
  RayHit out;
  double t = 0;
  double s = s_hint;
  geom::Vec3 p = origin;
  for (int step = 0; step < kMaxSteps; ++step) {
    s = nearest_arclength(p, s);
    const CenterlineSample c = centerline(s);
    const geom::Vec3 radial = p - c.position;
    const double margin = c.radius - radial.norm();
    if (margin < kTol) {
      if (s < 2.0 || s > config_.length_mm - 2.0) return out;  // open tube ends
      out.hit = true;
      out.point = p;
      out.s = s;
      const geom::Vec3 rdir = radial.normalized();
      out.inward_normal = -rdir;
      out.theta = std::atan2(rdir.dot(c.binormal), rdir.dot(c.normal));
      out.t = t;
      return out;
    }
    // Margin is ~1-Lipschitz along the ray; 0.6x cannot skip the surface.
    const double dt = std::max(0.6 * margin, 0.02);
    t += dt;
    p = origin + t * dir;
    if (t > kMaxT) return out;
  }
  return out;
}

std::uint64_t TubeWorld::texture_grid_hash(int n_s, int n_theta) const {
  std::uint64_t h = 1469598103934665603ULL;
  for (int i = 0; i < n_s; ++i) {
    const double s = config_.length_mm * (i + 0.5) / n_s;
    for (int j = 0; j < n_theta; ++j) {
      const double theta = 2 * kPi * j / n_theta;
      const auto q = static_cast<std::uint64_t>(std::llround(texture(s, theta) * 1e9));
      h = (h ^ q) * 1099511628211ULL;
    }
  }
  return h;
}

}  // namespace tubeloc::sim

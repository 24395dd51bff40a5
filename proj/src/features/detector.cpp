#include "features/detector.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace tubeloc::features {

namespace {

constexpr double kBaseSigma = 1.2;
constexpr int kMinOctaveSize = 16;

struct FloatPlane {
  int w = 0, h = 0;
  std::vector<double> v;
  FloatPlane() = default;
  FloatPlane(int w_, int h_) : w(w_), h(h_), v(static_cast<std::size_t>(w_) * h_, 0.0) {}
  double at(int x, int y) const { return v[static_cast<std::size_t>(y) * w + x]; }
  double& at(int x, int y) { return v[static_cast<std::size_t>(y) * w + x]; }
  double at_clamped(int x, int y) const {
    x = std::clamp(x, 0, w - 1);
    y = std::clamp(y, 0, h - 1);
    return at(x, y);
  }
};

FloatPlane to_float(const Image& img) {
  FloatPlane p(img.width, img.height);
  for (std::size_t i = 0; i < img.pixels.size(); ++i) p.v[i] = img.pixels[i];
  return p;
}

FloatPlane gaussian_blur(const FloatPlane& src, double sigma) {
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> kernel(2 * radius + 1);
  double sum = 0;
  for (int i = -radius; i <= radius; ++i) {
    kernel[i + radius] = std::exp(-0.5 * i * i / (sigma * sigma));
    sum += kernel[i + radius];
  }
  for (double& k : kernel) k /= sum;

  FloatPlane tmp(src.w, src.h), out(src.w, src.h);
  for (int y = 0; y < src.h; ++y)
    for (int x = 0; x < src.w; ++x) {
      double acc = 0;
      for (int i = -radius; i <= radius; ++i) acc += kernel[i + radius] * src.at_clamped(x + i, y);
      tmp.at(x, y) = acc;
    }
  for (int y = 0; y < src.h; ++y)
    for (int x = 0; x < src.w; ++x) {
      double acc = 0;
      for (int i = -radius; i <= radius; ++i) acc += kernel[i + radius] * tmp.at_clamped(x, y + i);
      out.at(x, y) = acc;
    }
  return out;
}

// Scale-normalized determinant of Hessian (sigma^4 * det) at interior pixels.
FloatPlane hessian_response(const FloatPlane& l, double sigma) {
  FloatPlane r(l.w, l.h);
  const double s4 = sigma * sigma * sigma * sigma;
  for (int y = 1; y < l.h - 1; ++y) {
    for (int x = 1; x < l.w - 1; ++x) {
      const double lxx = l.at(x + 1, y) - 2 * l.at(x, y) + l.at(x - 1, y);
      const double lyy = l.at(x, y + 1) - 2 * l.at(x, y) + l.at(x, y - 1);
      const double lxy = 0.25 * (l.at(x + 1, y + 1) - l.at(x - 1, y + 1) - l.at(x + 1, y - 1) +
                                 l.at(x - 1, y - 1));
      r.at(x, y) = s4 * (lxx * lyy - lxy * lxy);
    }
  }
  return r;
}

struct Candidate {
  double x, y;       // octave-image coords, sub-pixel
  int octave, level;
  double response;
  double sigma;      // level sigma in octave-image pixels
};

void gradient_at(const FloatPlane& l, double x, double y, double* gx, double* gy) {
  // Bilinear interpolation of central-difference gradients.
  const int x0 = std::clamp(static_cast<int>(std::floor(x)), 0, l.w - 1);
  const int y0 = std::clamp(static_cast<int>(std::floor(y)), 0, l.h - 1);
  const int x1 = std::min(x0 + 1, l.w - 1);
  const int y1 = std::min(y0 + 1, l.h - 1);
  const double fx = std::clamp(x - x0, 0.0, 1.0);
  const double fy = std::clamp(y - y0, 0.0, 1.0);
  auto gxy = [&l](int xi, int yi, double* dx, double* dy) {
    *dx = 0.5 * (l.at_clamped(xi + 1, yi) - l.at_clamped(xi - 1, yi));
    *dy = 0.5 * (l.at_clamped(xi, yi + 1) - l.at_clamped(xi, yi - 1));
  };
  double dx00, dy00, dx10, dy10, dx01, dy01, dx11, dy11;
  gxy(x0, y0, &dx00, &dy00);
  gxy(x1, y0, &dx10, &dy10);
  gxy(x0, y1, &dx01, &dy01);
  gxy(x1, y1, &dx11, &dy11);
  *gx = (1 - fy) * ((1 - fx) * dx00 + fx * dx10) + fy * ((1 - fx) * dx01 + fx * dx11);
  *gy = (1 - fy) * ((1 - fx) * dy00 + fx * dy10) + fy * ((1 - fx) * dy01 + fx * dy11);
}

Descriptor describe(const FloatPlane& l, const Candidate& c) {
  // Upright gradient grid: 4x4 cells, 5x5 samples per cell, over an
  // axis-aligned window of 8*sigma. Trajectories have bounded roll, so no
  // orientation estimation; an upright patch matches more stably under the
  // strong perspective changes inside the tube.
  Descriptor d = Descriptor::Zero();
  const double half = 4.0 * c.sigma;
  const double step = half / 10.0;
  const double weight_sigma = 0.8 * half;
  for (int cy = 0; cy < 4; ++cy) {
    for (int cx = 0; cx < 4; ++cx) {
      double sdx = 0, sdy = 0, sadx = 0, sady = 0;
      for (int sy_i = 0; sy_i < 5; ++sy_i) {
        for (int sx_i = 0; sx_i < 5; ++sx_i) {
          const double u = -half + (cx * 5 + sx_i + 0.5) * step;
          const double v = -half + (cy * 5 + sy_i + 0.5) * step;
          double gx, gy;
          gradient_at(l, c.x + u, c.y + v, &gx, &gy);
          const double w = std::exp(-0.5 * (u * u + v * v) / (weight_sigma * weight_sigma));
          sdx += w * gx;
          sdy += w * gy;
          sadx += w * std::abs(gx);
          sady += w * std::abs(gy);
        }
      }
      const int base = (cy * 4 + cx) * 4;
      d[base + 0] = sdx;
      d[base + 1] = sdy;
      d[base + 2] = sadx;
      d[base + 3] = sady;
    }
  }
  const double n = d.norm();
  if (n > 1e-12)
    d /= n;
  else
    d[0] = 1.0;
  return d;
}

}  // namespace

FrameFeatures detect_and_describe(const Image& image, const DetectorParams& params,
                                  int image_index) {
  if (image.width < 32 || image.height < 32)
    throw std::invalid_argument("detect_and_describe: image smaller than 32x32");

  struct Scored {
    Keypoint kp;
    Descriptor desc;
  };
  std::vector<Scored> found;

  Image octave_img = image;
  for (int o = 0; o < params.octaves; ++o) {
    if (o > 0) {
      octave_img = downsample2(octave_img);
      if (std::min(octave_img.width, octave_img.height) < kMinOctaveSize) break;
    }
    const FloatPlane base = to_float(octave_img);
    std::vector<FloatPlane> smooth(params.levels), resp(params.levels);
    std::vector<double> sigmas(params.levels);
    for (int lv = 0; lv < params.levels; ++lv) {
      sigmas[lv] = kBaseSigma * std::pow(2.0, double(lv) / params.levels);
      smooth[lv] = gaussian_blur(base, sigmas[lv]);
      resp[lv] = hessian_response(smooth[lv], sigmas[lv]);
    }
    const double scale = std::pow(2.0, o);
    for (int lv = 1; lv + 1 < params.levels; ++lv) {
      const FloatPlane& r = resp[lv];
      for (int y = 2; y < r.h - 2; ++y) {
        for (int x = 2; x < r.w - 2; ++x) {
          const double v = r.at(x, y);
          if (v <= params.response_threshold) continue;
          bool is_max = true;
          for (int dl = -1; dl <= 1 && is_max; ++dl)
            for (int dy = -1; dy <= 1 && is_max; ++dy)
              for (int dx = -1; dx <= 1 && is_max; ++dx) {
                if (dl == 0 && dx == 0 && dy == 0) continue;
                if (resp[lv + dl].at(x + dx, y + dy) >= v) is_max = false;
              }
          if (!is_max) continue;

          // Quadratic sub-pixel refinement in x,y.
          const double gx = 0.5 * (r.at(x + 1, y) - r.at(x - 1, y));
          const double gy = 0.5 * (r.at(x, y + 1) - r.at(x, y - 1));
          const double hxx = r.at(x + 1, y) - 2 * v + r.at(x - 1, y);
          const double hyy = r.at(x, y + 1) - 2 * v + r.at(x, y - 1);
          const double hxy = 0.25 * (r.at(x + 1, y + 1) - r.at(x - 1, y + 1) -
                                     r.at(x + 1, y - 1) + r.at(x - 1, y - 1));
          const double det = hxx * hyy - hxy * hxy;
          double ox = 0, oy = 0;
          if (std::abs(det) > 1e-12) {
            ox = std::clamp(-(hyy * gx - hxy * gy) / det, -0.6, 0.6);
            oy = std::clamp(-(hxx * gy - hxy * gx) / det, -0.6, 0.6);
          }
          Candidate c{x + ox, y + oy, o, lv, v, sigmas[lv]};
          Keypoint kp;
          kp.pixel = Eigen::Vector2d((c.x + 0.5) * scale - 0.5, (c.y + 0.5) * scale - 0.5);
          kp.octave = o;
          kp.response = v;
          if (kp.pixel.x() < 0 || kp.pixel.x() >= image.width || kp.pixel.y() < 0 ||
              kp.pixel.y() >= image.height)
            continue;
          found.push_back({kp, describe(smooth[lv], c)});
        }
      }
    }
  }

  std::sort(found.begin(), found.end(), [](const Scored& a, const Scored& b) {
    if (a.kp.response != b.kp.response) return a.kp.response > b.kp.response;
    if (a.kp.pixel.y() != b.kp.pixel.y()) return a.kp.pixel.y() < b.kp.pixel.y();
    if (a.kp.pixel.x() != b.kp.pixel.x()) return a.kp.pixel.x() < b.kp.pixel.x();
    return a.kp.octave < b.kp.octave;
  });

  FrameFeatures out;
  out.image_index = image_index;
  out.keypoints.reserve(found.size());
  out.descriptors.reserve(found.size());
  for (auto& s : found) {
    out.keypoints.push_back(s.kp);
    out.descriptors.push_back(s.desc);
  }
  return out;
}

}  // namespace tubeloc::features

// Seeded 3D value noise with fractional-Brownian stacking.
#pragma once

#include <Eigen/Core>
#include <cstdint>

#include "core/rng.hpp"

namespace tubeloc::sim {

class ValueNoise3 {
 public:
  explicit ValueNoise3(std::uint64_t seed) : seed_(seed) {}

  double lattice(int x, int y, int z) const {
    std::uint64_t h = mix_seed(seed_, static_cast<std::uint64_t>(static_cast<std::int64_t>(x)));
    h = mix_seed(h, static_cast<std::uint64_t>(static_cast<std::int64_t>(y)));
    h = mix_seed(h, static_cast<std::uint64_t>(static_cast<std::int64_t>(z)));
    return static_cast<double>(h >> 11) * (1.0 / 9007199254740992.0);  // [0, 1)
  }

  // Trilinear smoothstep interpolation of lattice values; returns [0, 1).
  double sample(const Eigen::Vector3d& p) const {
    const int x0 = static_cast<int>(std::floor(p.x()));
    const int y0 = static_cast<int>(std::floor(p.y()));
    const int z0 = static_cast<int>(std::floor(p.z()));
    const double fx = smooth(p.x() - x0), fy = smooth(p.y() - y0), fz = smooth(p.z() - z0);
    double acc = 0;
    for (int dz = 0; dz <= 1; ++dz)
      for (int dy = 0; dy <= 1; ++dy)
        for (int dx = 0; dx <= 1; ++dx) {
          const double w = (dx ? fx : 1 - fx) * (dy ? fy : 1 - fy) * (dz ? fz : 1 - fz);
          acc += w * lattice(x0 + dx, y0 + dy, z0 + dz);
        }
    return acc;
  }

  // Multi-octave sum, normalized back to [0, 1).
  double fbm(const Eigen::Vector3d& p, int octaves, double gain = 0.5) const {
    double amp = 1, freq = 1, acc = 0, norm = 0;
    for (int o = 0; o < octaves; ++o) {
      acc += amp * sample(freq * p + Eigen::Vector3d::Constant(17.31 * o));
      norm += amp;
      amp *= gain;
      freq *= 2;
    }
    return acc / norm;
  }

 private:
  static double smooth(double t) { return t * t * (3 - 2 * t); }
  std::uint64_t seed_;
};

}  // namespace tubeloc::sim

// Image normalization in front of the embedding network.
#pragma once

#include <vector>

#include "core/image.hpp"

namespace tubeloc::classifier {

// Square standardized raster fed to the network.
struct Raster {
  int size = 0;
  std::vector<double> v;  // row-major, size*size entries
};

// Bilinear resize to target_size, then per-image standardization to zero mean
// and unit variance (divisor max(sigma, 1e-6), so constant images map to all
// zeros). Deterministic. Throws std::invalid_argument on an empty image.
Raster preprocess(const Image& image, int target_size);

}  // namespace tubeloc::classifier

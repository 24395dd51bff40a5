#include "classifier/preprocess.hpp"

#include <cmath>
#include <stdexcept>

namespace tubeloc::classifier {

Raster preprocess(const Image& image, int target_size) {
  if (image.empty())
    throw std::invalid_argument("preprocess: empty image");
  if (target_size < 1)
    throw std::invalid_argument("preprocess: target size must be positive");

  Raster out;
  out.size = target_size;
  out.v = resize_bilinear(image, target_size, target_size);

  const std::size_t n = out.v.size();
  double mean = 0;
  for (double p : out.v) mean += p;
  mean /= static_cast<double>(n);
  double var = 0;
  for (double p : out.v) var += (p - mean) * (p - mean);
  var /= static_cast<double>(n);
  const double inv = 1.0 / std::max(std::sqrt(var), 1e-6);
  for (double& p : out.v) p = (p - mean) * inv;
  return out;
}

}  // namespace tubeloc::classifier

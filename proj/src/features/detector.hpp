// Multiscale determinant-of-Hessian interest points with oriented
// gradient-grid descriptors.
#pragma once

#include "core/image.hpp"
#include "features/types.hpp"

namespace tubeloc::features {

// Detects blob-like keypoints over a Gaussian scale pyramid (params.octaves x
// params.levels) and describes each with a 64-dim oriented gradient grid.
// Deterministic: identical input yields identical output; keypoints are sorted
// by response (desc), then pixel, then octave.
//
// Throws std::invalid_argument when the image is smaller than 32x32.
FrameFeatures detect_and_describe(const Image& image, const DetectorParams& params,
                                  int image_index = 0);

}  // namespace tubeloc::features

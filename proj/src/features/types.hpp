// Interest-point, descriptor, and track containers shared across the pipeline.
#pragma once

#include <Eigen/Core>
#include <vector>

namespace tubeloc::features {

inline constexpr int kDescriptorLength = 64;

// L2-normalized gradient-grid descriptor (4x4 cells x 4 stats).
using Descriptor = Eigen::Matrix<double, kDescriptorLength, 1>;

struct Keypoint {
  Eigen::Vector2d pixel = Eigen::Vector2d::Zero();  // original-image coords, sub-pixel
  int octave = 0;                                   // >= 0
  double response = 0;                              // det-of-Hessian score, >= 0
};

struct FrameFeatures {
  int image_index = 0;
  std::vector<Keypoint> keypoints;
  std::vector<Descriptor> descriptors;  // parallel to keypoints
};

struct DetectorParams {
  double response_threshold = 2.0;  // scale-normalized det-of-Hessian, 8-bit intensity units
  int octaves = 4;
  int levels = 6;
  double ratio = 0.8;  // Lowe ratio for matching (pipeline default overrides to 0.7)
};

// A keypoint chained across >= 2 frames; at most one observation per image.
struct Track {
  std::vector<std::pair<int, int>> observations;  // (image_index, keypoint_index)
  Descriptor descriptor;                          // from the first observation
};

}  // namespace tubeloc::features

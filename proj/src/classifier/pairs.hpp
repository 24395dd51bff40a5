// Balanced training-pair generation over a zone assignment.
#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "classifier/preprocess.hpp"

namespace tubeloc::classifier {

struct PairSample {
  std::shared_ptr<const Raster> image_a, image_b;
  int index_a = 0, index_b = 0;  // dataset indices
  int label = 0;                 // 0 same zone, 1 different zone
};

// Number of distinct same-zone unordered pairs, sum over zones of C(m, 2).
std::uint64_t positive_pair_pool_size(const std::vector<int>& zone_sizes);

// count/2 positive and count/2 negative pairs, drawn uniformly from their
// pools with the seeded generator; no duplicate unordered pairs in one call.
// zone_of_image[i] is the zone of images[i]; every zone needs >= 2 members.
//
// Throws std::invalid_argument on an odd/oversized count or an undersized zone.
std::vector<PairSample> generate_pairs(const std::vector<std::shared_ptr<const Raster>>& images,
                                       const std::vector<int>& zone_of_image, int count,
                                       std::uint64_t seed);

}  // namespace tubeloc::classifier

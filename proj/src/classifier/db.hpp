// Training-image descriptor database and nearest-descriptor zone lookup.
#pragma once

#include <memory>
#include <string>
#include <vector>

#include "classifier/net.hpp"

namespace tubeloc::classifier {

struct DbEntry {
  Embedding embedding;
  int zone_id = -1;
  int image_index = -1;  // index into the training trajectory
};

struct DescriptorDB {
  std::vector<DbEntry> entries;
};

// Embeds every raster and tags it with its zone.
DescriptorDB build_db(const EmbedModel& model,
                      const std::vector<std::shared_ptr<const Raster>>& images,
                      const std::vector<int>& zone_of_image);

struct ClassifyResult {
  int zone_id = -1;
  double distance = 0;  // Euclidean, to the nearest database embedding
};

// Zone of the nearest database embedding; the x=0 contrastive branch is
// monotone in distance, so nearest distance and smallest loss agree. Exact
// distance ties go to the lowest zone_id. Throws on an empty database.
ClassifyResult classify(const EmbedModel& model, const DescriptorDB& db, const Image& image);

// Text format, one row per image: image_index zone_id e_0 ... e_{127}
void write_db(const std::string& path, const DescriptorDB& db);
DescriptorDB read_db(const std::string& path);

}  // namespace tubeloc::classifier

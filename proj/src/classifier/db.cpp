#include "classifier/db.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace tubeloc::classifier {

DescriptorDB build_db(const EmbedModel& model,
                      const std::vector<std::shared_ptr<const Raster>>& images,
                      const std::vector<int>& zone_of_image) {
  if (images.size() != zone_of_image.size())
    throw std::invalid_argument("build_db: images/zones size mismatch");
  DescriptorDB db;
  db.entries.reserve(images.size());
  for (std::size_t i = 0; i < images.size(); ++i) {
    DbEntry e;
    e.embedding = embed(model, *images[i]);
    e.zone_id = zone_of_image[i];
    e.image_index = static_cast<int>(i);
    db.entries.push_back(std::move(e));
  }
  return db;
}

ClassifyResult classify(const EmbedModel& model, const DescriptorDB& db, const Image& image) {
  if (db.entries.empty())
    throw std::invalid_argument("classify: empty descriptor database");
  const Embedding query = embed(model, preprocess(image, model.arch.input_size));
  ClassifyResult best;
  double best_d2 = -1;
  for (const DbEntry& e : db.entries) {
    const double d2 = (query - e.embedding).squaredNorm();
    if (best_d2 < 0 || d2 < best_d2 || (d2 == best_d2 && e.zone_id < best.zone_id)) {
      best_d2 = d2;
      best.zone_id = e.zone_id;
    }
  }
  best.distance = std::sqrt(best_d2);
  return best;
}

void write_db(const std::string& path, const DescriptorDB& db) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("write_db: cannot open " + path);
  char buf[40];
  for (const DbEntry& e : db.entries) {
    out << e.image_index << ' ' << e.zone_id;
    for (Eigen::Index i = 0; i < e.embedding.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.9g", e.embedding[i]);
      out << ' ' << buf;
    }
    out << '\n';
  }
  if (!out)
    throw std::runtime_error("write_db: write failed for " + path);
}

DescriptorDB read_db(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("read_db: cannot open " + path);
  DescriptorDB db;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream is(line);
    DbEntry e;
    if (!(is >> e.image_index >> e.zone_id))
      throw std::runtime_error("read_db: malformed row in " + path);
    std::vector<double> vals;
    double v;
    while (is >> v) vals.push_back(v);
    e.embedding = Eigen::Map<const Eigen::VectorXd>(vals.data(), vals.size());
    if (!db.entries.empty() && db.entries.front().embedding.size() != e.embedding.size())
      throw std::runtime_error("read_db: inconsistent embedding length in " + path);
    db.entries.push_back(std::move(e));
  }
  return db;
}

}  // namespace tubeloc::classifier

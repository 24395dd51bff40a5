#include "geom/zone_map.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace tubeloc::geom {

ZoneMapBuild build_zone_map(const std::vector<features::FrameFeatures>& frames,
                            const std::vector<Pose>& poses, const CameraIntrinsics& k,
                            double delta_r, int zone_id, double match_ratio) {
  if (frames.size() < 3)
    throw std::invalid_argument("build_zone_map: need >= 3 frames");
  if (frames.size() != poses.size())
    throw std::invalid_argument("build_zone_map: frames/poses size mismatch");

  std::unordered_map<int, std::size_t> frame_of_image;
  for (std::size_t i = 0; i < frames.size(); ++i) frame_of_image[frames[i].image_index] = i;

  const auto tracks = features::match_tracks(frames, match_ratio);

  ZoneMapBuild out;
  for (const auto& track : tracks) {
    std::vector<std::pair<Observation2D, Pose>> obs;
    obs.reserve(track.observations.size());
    for (const auto& [image_index, kp_index] : track.observations) {
      const std::size_t f = frame_of_image.at(image_index);
      Observation2D o;
      o.pixel = frames[f].keypoints[kp_index].pixel;
      o.image_index = image_index;
      obs.emplace_back(o, poses[f]);
    }
    const auto point = triangulate_point(obs, k);
    if (!point)
      continue;
    double max_err = 0;
    bool valid = true;
    for (const auto& [o, pose] : obs) {
      const auto px = project(pose, k, *point);
      if (!px) {
        valid = false;
        break;
      }
      max_err = std::max(max_err, (*px - o.pixel).norm());
    }
    if (!valid || max_err > delta_r)
      continue;
    MapPoint mp;
    mp.position = *point;
    mp.descriptor = track.descriptor;
    mp.zone_id = zone_id;
    mp.max_reproj_error = max_err;
    out.points.push_back(std::move(mp));
    std::vector<Observation2D> prov;
    prov.reserve(obs.size());
    for (const auto& [o, pose] : obs) prov.push_back(o);
    out.provenance.push_back(std::move(prov));
  }
  return out;
}

namespace {

void append_g9(std::string& s, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  s += buf;
}

}  // namespace

void write_zone_map(const std::string& path, int zone_id, double delta_r,
                    const std::vector<MapPoint>& points) {
  std::string body;
  body += std::to_string(zone_id);
  body += ' ';
  body += std::to_string(points.size());
  body += ' ';
  body += std::to_string(features::kDescriptorLength);
  body += ' ';
  append_g9(body, delta_r);
  body += '\n';
  for (const auto& p : points) {
    append_g9(body, p.position.x());
    body += ' ';
    append_g9(body, p.position.y());
    body += ' ';
    append_g9(body, p.position.z());
    body += ' ';
    append_g9(body, p.max_reproj_error);
    for (int i = 0; i < features::kDescriptorLength; ++i) {
      body += ' ';
      append_g9(body, p.descriptor[i]);
    }
    body += '\n';
  }
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("write_zone_map: cannot open " + path);
  out.write(body.data(), static_cast<std::streamsize>(body.size()));
  if (!out)
    throw std::runtime_error("write_zone_map: write failed for " + path);
}

ZoneMapFile read_zone_map(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("read_zone_map: cannot open " + path);
  ZoneMapFile file;
  std::size_t n_points = 0;
  int descriptor_len = 0;
  if (!(in >> file.zone_id >> n_points >> descriptor_len >> file.delta_r))
    throw std::runtime_error("read_zone_map: malformed header in " + path);
  if (descriptor_len != features::kDescriptorLength)
    throw std::runtime_error("read_zone_map: unsupported descriptor length in " + path);
  file.points.resize(n_points);
  for (std::size_t i = 0; i < n_points; ++i) {
    MapPoint& p = file.points[i];
    p.zone_id = file.zone_id;
    if (!(in >> p.position.x() >> p.position.y() >> p.position.z() >> p.max_reproj_error))
      throw std::runtime_error("read_zone_map: truncated point data in " + path);
    for (int d = 0; d < descriptor_len; ++d)
      if (!(in >> p.descriptor[d]))
        throw std::runtime_error("read_zone_map: truncated descriptor in " + path);
  }
  return file;
}

}  // namespace tubeloc::geom

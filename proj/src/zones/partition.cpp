#include "zones/partition.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace tubeloc::zones {

namespace {

std::string g9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

void finish_zone(Zone& z, const sim::Dataset& dataset) {
  z.median_index = z.begin + (z.size() - 1) / 2;
  z.median_pose = dataset.samples[z.median_index].pose;
  double diam = 0;
  for (int i = z.begin; i < z.end; ++i)
    for (int j = i + 1; j < z.end; ++j)
      diam = std::max(diam, (dataset.samples[i].pose.position -
                             dataset.samples[j].pose.position).norm());
  z.pose_diameter = diam;
}

std::string map_file_name(int zone_id) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "zone_%04d.map", zone_id);
  return buf;
}

}  // namespace

int ZonePartition::zone_of(int image_index) const {
  for (const Zone& z : zones)
    if (image_index >= z.begin && image_index < z.end) return z.zone_id;
  return -1;
}

std::vector<int> ZonePartition::zone_of_image() const {
  std::vector<int> out(n_images, -1);
  for (const Zone& z : zones)
    for (int i = z.begin; i < z.end; ++i) out[i] = z.zone_id;
  return out;
}

std::vector<int> ZonePartition::zone_sizes() const {
  std::vector<int> out;
  out.reserve(zones.size());
  for (const Zone& z : zones) out.push_back(z.size());
  return out;
}

void ZonePartition::validate() const {
  int expected_begin = 0;
  for (std::size_t i = 0; i < zones.size(); ++i) {
    const Zone& z = zones[i];
    if (z.zone_id != static_cast<int>(i))
      throw std::logic_error("ZonePartition: zone ids must be sequential");
    if (z.begin != expected_begin || z.end <= z.begin)
      throw std::logic_error("ZonePartition: zones must be contiguous and non-empty");
    if (z.median_index < z.begin || z.median_index >= z.end)
      throw std::logic_error("ZonePartition: median outside the zone");
    expected_begin = z.end;
  }
  if (expected_begin != n_images)
    throw std::logic_error("ZonePartition: zones do not cover all images");
}

ZonePartition partition_uniform(const sim::Dataset& dataset, int n_zones) {
  const int n = dataset.size();
  if (n_zones < 1 || n_zones > n / 2)
    throw std::invalid_argument("partition_uniform: need 1 <= n_zones <= images/2");
  ZonePartition p;
  p.n_images = n;
  const int base = n / n_zones;
  const int remainder = n % n_zones;
  int begin = 0;
  for (int z = 0; z < n_zones; ++z) {
    Zone zone;
    zone.zone_id = z;
    zone.begin = begin;
    zone.end = begin + base + (z < remainder ? 1 : 0);
    zone.label = "zone_" + std::to_string(z);
    finish_zone(zone, dataset);
    begin = zone.end;
    p.zones.push_back(std::move(zone));
  }
  p.validate();
  return p;
}

ZonePartition partition_from_labels(const sim::Dataset& dataset, const std::string& label_file) {
  std::ifstream in(label_file);
  if (!in)
    throw std::runtime_error("partition_from_labels: cannot open " + label_file);

  struct Range {
    int begin, end;  // inclusive
    std::string name;
    int splits;
  };
  std::vector<Range> ranges;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream is(line);
    Range r;
    std::string name_field;
    if (!(is >> r.begin >> r.end >> name_field))
      throw std::invalid_argument("partition_from_labels: malformed line: " + line);
    r.splits = 1;
    const auto colon = name_field.rfind(':');
    if (colon != std::string::npos) {
      r.splits = std::stoi(name_field.substr(colon + 1));
      name_field = name_field.substr(0, colon);
      if (r.splits < 1)
        throw std::invalid_argument("partition_from_labels: bad subclass count: " + line);
    }
    r.name = name_field;
    ranges.push_back(std::move(r));
  }
  std::sort(ranges.begin(), ranges.end(),
            [](const Range& a, const Range& b) { return a.begin < b.begin; });

  int expected = 0;
  for (const Range& r : ranges) {
    if (r.begin != expected || r.end < r.begin)
      throw std::invalid_argument(
          "partition_from_labels: gap or overlap in labels at index " + std::to_string(r.begin));
    expected = r.end + 1;
  }
  if (expected != dataset.size())
    throw std::invalid_argument("partition_from_labels: gap or overlap in labels at index " +
                                std::to_string(expected));

  ZonePartition p;
  p.n_images = dataset.size();
  for (const Range& r : ranges) {
    const int members = r.end - r.begin + 1;
    const int splits = std::min(r.splits, members);
    const int base = members / splits;
    const int remainder = members % splits;
    int begin = r.begin;
    for (int s = 0; s < splits; ++s) {
      Zone zone;
      zone.zone_id = static_cast<int>(p.zones.size());
      zone.begin = begin;
      zone.end = begin + base + (s < remainder ? 1 : 0);
      zone.label = splits > 1 ? r.name + "_" + std::to_string(s) : r.name;
      finish_zone(zone, dataset);
      begin = zone.end;
      p.zones.push_back(std::move(zone));
    }
  }
  p.validate();
  return p;
}

std::vector<int> select_frame_indices(const Zone& zone, int m_select) {
  const int size = zone.size();
  std::vector<int> out;
  if (m_select >= size) {
    for (int i = zone.begin; i < zone.end; ++i) out.push_back(i);
    return out;
  }
  for (int t = 0; t < m_select; ++t)
    out.push_back(zone.begin + (t * (size - 1)) / (m_select - 1));
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

BuildMapsReport build_all_maps(ZonePartition& partition, const sim::Dataset& dataset,
                               int m_select, double delta_r,
                               const features::DetectorParams& detector) {
  if (m_select < 3)
    throw std::invalid_argument("build_all_maps: m_select must be >= 3");
  BuildMapsReport report;
  report.provenance.resize(partition.zones.size());
  for (Zone& zone : partition.zones) {
    zone.map.clear();
    if (zone.size() < 3) {
      report.warnings.push_back("zone " + std::to_string(zone.zone_id) +
                                ": fewer than 3 members, map left empty");
      continue;
    }
    const auto indices = select_frame_indices(zone, m_select);
    std::vector<features::FrameFeatures> frames;
    std::vector<geom::Pose> poses;
    frames.reserve(indices.size());
    poses.reserve(indices.size());
    for (int idx : indices) {
      frames.push_back(features::detect_and_describe(dataset.load_image(idx), detector, idx));
      poses.push_back(dataset.samples[idx].pose);
    }
    auto build = geom::build_zone_map(frames, poses, dataset.intrinsics, delta_r, zone.zone_id,
                                      detector.ratio);
    zone.map = std::move(build.points);
    report.provenance[zone.zone_id] = std::move(build.provenance);
    if (zone.map.empty())
      report.warnings.push_back("zone " + std::to_string(zone.zone_id) +
                                ": no landmarks survived the delta_r filter");
  }
  return report;
}

void write_partition(const std::string& dir, const ZonePartition& partition, double delta_r) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec)
    throw std::runtime_error("write_partition: cannot create " + dir);
  std::ofstream out(dir + "/manifest.txt", std::ios::binary);
  if (!out)
    throw std::runtime_error("write_partition: cannot open manifest in " + dir);
  out << "n_zones " << partition.zones.size() << '\n';
  out << "n_images " << partition.n_images << '\n';
  out << "delta_r " << g9(delta_r) << '\n';
  for (const Zone& z : partition.zones) {
    const Eigen::Quaterniond q = z.median_pose.rotation.quaternion();
    const Eigen::Quaterniond qc = q.w() < 0 ? Eigen::Quaterniond(-q.w(), -q.x(), -q.y(), -q.z()) : q;
    out << "zone " << z.zone_id << ' ' << z.begin << ' ' << z.end << ' ' << z.median_index << ' '
        << z.label << ' ' << g9(z.pose_diameter) << ' ' << g9(z.median_pose.position.x()) << ' '
        << g9(z.median_pose.position.y()) << ' ' << g9(z.median_pose.position.z()) << ' '
        << g9(qc.w()) << ' ' << g9(qc.x()) << ' ' << g9(qc.y()) << ' ' << g9(qc.z()) << '\n';
  }
  if (!out)
    throw std::runtime_error("write_partition: manifest write failed");
  for (const Zone& z : partition.zones)
    geom::write_zone_map(dir + "/" + map_file_name(z.zone_id), z.zone_id, delta_r, z.map);
}

ZonePartition read_partition(const std::string& dir) {
  std::ifstream in(dir + "/manifest.txt");
  if (!in)
    throw std::runtime_error("read_partition: cannot open manifest in " + dir);
  ZonePartition p;
  std::string key;
  std::size_t n_zones = 0;
  double delta_r = 0;
  in >> key >> n_zones;
  in >> key >> p.n_images;
  in >> key >> delta_r;
  for (std::size_t i = 0; i < n_zones; ++i) {
    Zone z;
    double px, py, pz, qw, qx, qy, qz;
    if (!(in >> key >> z.zone_id >> z.begin >> z.end >> z.median_index >> z.label >>
          z.pose_diameter >> px >> py >> pz >> qw >> qx >> qy >> qz) ||
        key != "zone")
      throw std::runtime_error("read_partition: malformed manifest in " + dir);
    z.median_pose = geom::Pose(
        geom::Rotation::from_quaternion(Eigen::Quaterniond(qw, qx, qy, qz)),
        geom::Vec3(px, py, pz));
    const auto file = geom::read_zone_map(dir + "/" + map_file_name(z.zone_id));
    z.map = file.points;
    p.zones.push_back(std::move(z));
  }
  p.validate();
  return p;
}

}  // namespace tubeloc::zones

// Trajectory partitioning into contiguous zones, per-zone map construction,
// and partition persistence.
#pragma once

#include <string>
#include <vector>

#include "features/detector.hpp"
#include "geom/zone_map.hpp"
#include "sim/dataset.hpp"

namespace tubeloc::zones {

struct Zone {
  int zone_id = -1;
  int begin = 0, end = 0;  // member sample range [begin, end), trajectory order
  int median_index = 0;    // trajectory index of the median member
  geom::Pose median_pose;  // ground-truth pose of that member
  double pose_diameter = 0;  // max pairwise member-position distance, mm
  std::string label;
  std::vector<geom::MapPoint> map;  // empty until build_all_maps

  int size() const { return end - begin; }
};

struct ZonePartition {
  int n_images = 0;
  std::vector<Zone> zones;

  int zone_of(int image_index) const;
  std::vector<int> zone_of_image() const;
  std::vector<int> zone_sizes() const;
  // Coverage, disjointness, and contiguity; throws std::logic_error on violation.
  void validate() const;
};

// n_zones contiguous blocks differing in size by at most 1.
// Throws std::invalid_argument when n_zones > images / 2 or n_zones < 1.
ZonePartition partition_uniform(const sim::Dataset& dataset, int n_zones);

// Zones from a label file of lines `start_index end_index name[:subclass_count]`
// (inclusive ranges; a subclass count splits the range into that many
// contiguous near-equal zones). Ranges must cover every image exactly once;
// throws std::invalid_argument naming the gap or overlap otherwise.
ZonePartition partition_from_labels(const sim::Dataset& dataset, const std::string& label_file);

// Evenly spaced member indices, endpoints included.
std::vector<int> select_frame_indices(const Zone& zone, int m_select);

struct BuildMapsReport {
  std::vector<std::string> warnings;  // zones skipped or left empty
  // provenance[z][p] lists the source observations of partition.zones[z].map[p]
  std::vector<std::vector<std::vector<geom::Observation2D>>> provenance;
};

// Builds every zone's landmark map from m_select evenly selected members.
// Zones with fewer than 3 members keep an empty map and add a warning record.
// Throws std::invalid_argument when m_select < 3.
BuildMapsReport build_all_maps(ZonePartition& partition, const sim::Dataset& dataset,
                               int m_select, double delta_r,
                               const features::DetectorParams& detector);

// Partition directory: manifest.txt (members, medians, labels) plus one
// zone-map file per zone in the zone_map columnar format.
void write_partition(const std::string& dir, const ZonePartition& partition, double delta_r);
ZonePartition read_partition(const std::string& dir);

}  // namespace tubeloc::zones

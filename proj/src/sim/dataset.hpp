// Dataset on disk: PGM frames, poses.csv, expert zone labels, and a manifest.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/image.hpp"
#include "geom/camera.hpp"
#include "sim/trajectory.hpp"
#include "sim/world.hpp"

namespace tubeloc::sim {

struct DatasetSample {
  std::string image_file;  // relative to the dataset dir
  geom::Pose pose;         // ground truth, camera-to-world
  double timestamp = 0;
  double arclength = 0;
  std::string section;
};

struct Dataset {
  std::string dir;
  geom::CameraIntrinsics intrinsics;
  std::uint64_t world_seed = 0;
  std::vector<DatasetSample> samples;

  Image load_image(int index) const;
  int size() const { return static_cast<int>(samples.size()); }
};

// Renders every trajectory pose and writes the dataset directory:
//   img_%05d.pgm, poses.csv, expert_zones.txt, manifest.txt
// The expert label file carries the world's sections split into sub-classes so
// the total zone count reaches expert_zone_target (larger sections split
// first). Fully reproducible from the seeds; no timestamps in any file.
Dataset emit_dataset(const TubeWorld& world, const std::vector<TimedPose>& trajectory,
                     const geom::CameraIntrinsics& k, const std::string& out_dir,
                     int expert_zone_target);

Dataset load_dataset(const std::string& dir);

// poses.csv row formatting/parsing (header:
// index,timestamp,px,py,pz,qw,qx,qy,qz,arclength,section). The quaternion is
// normalized with a canonical non-negative w. Parsing then re-serializing a
// row is byte-identical.
std::string format_pose_row(int index, const DatasetSample& s);
DatasetSample parse_pose_row(const std::string& line, int* index_out);

}  // namespace tubeloc::sim

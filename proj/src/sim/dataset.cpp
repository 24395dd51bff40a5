#include "sim/dataset.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "sim/render.hpp"

namespace tubeloc::sim {

namespace {

std::string g9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

Eigen::Quaterniond canonical_quaternion(const geom::Rotation& r) {
  Eigen::Quaterniond q = r.quaternion().normalized();
  bool flip = q.w() < 0;
  if (q.w() == 0) {
    if (q.x() != 0)
      flip = q.x() < 0;
    else if (q.y() != 0)
      flip = q.y() < 0;
    else
      flip = q.z() < 0;
  }
  if (flip) q.coeffs() = -q.coeffs();
  return q;
}

std::string image_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "img_%05d.pgm", index);
  return buf;
}

}  // namespace

std::string format_pose_row(int index, const DatasetSample& s) {
  const Eigen::Quaterniond q = canonical_quaternion(s.pose.rotation);
  std::ostringstream os;
  os << index << ',' << g9(s.timestamp) << ',' << g9(s.pose.position.x()) << ','
     << g9(s.pose.position.y()) << ',' << g9(s.pose.position.z()) << ',' << g9(q.w()) << ','
     << g9(q.x()) << ',' << g9(q.y()) << ',' << g9(q.z()) << ',' << g9(s.arclength) << ','
     << s.section;
  return os.str();
}

DatasetSample parse_pose_row(const std::string& line, int* index_out) {
  std::istringstream is(line);
  std::string field;
  auto next = [&]() -> std::string {
    if (!std::getline(is, field, ','))
      throw std::runtime_error("poses.csv: truncated row: " + line);
    return field;
  };
  DatasetSample s;
  const int index = std::stoi(next());
  s.timestamp = std::stod(next());
  const double px = std::stod(next()), py = std::stod(next()), pz = std::stod(next());
  const double qw = std::stod(next()), qx = std::stod(next()), qy = std::stod(next()),
               qz = std::stod(next());
  s.arclength = std::stod(next());
  s.section = next();
  s.pose = geom::Pose(geom::Rotation::from_quaternion(Eigen::Quaterniond(qw, qx, qy, qz)),
                      geom::Vec3(px, py, pz));
  s.image_file = image_name(index);
  if (index_out) *index_out = index;
  return s;
}

Dataset emit_dataset(const TubeWorld& world, const std::vector<TimedPose>& trajectory,
                     const geom::CameraIntrinsics& k, const std::string& out_dir,
                     int expert_zone_target) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec)
    throw std::runtime_error("emit_dataset: cannot create " + out_dir);

  Dataset ds;
  ds.dir = out_dir;
  ds.intrinsics = k;
  ds.world_seed = world.seed();

  for (std::size_t i = 0; i < trajectory.size(); ++i) {
    const auto& tp = trajectory[i];
    const Image img = render(world, tp.pose, k);
    write_pgm(out_dir + "/" + image_name(static_cast<int>(i)), img);
    DatasetSample s;
    s.image_file = image_name(static_cast<int>(i));
    s.pose = tp.pose;
    s.timestamp = tp.timestamp;
    s.arclength = tp.arclength;
    s.section = world.section_at(tp.arclength).name;
    ds.samples.push_back(std::move(s));
  }

  {
    std::ofstream out(out_dir + "/poses.csv", std::ios::binary);
    out << "index,timestamp,px,py,pz,qw,qx,qy,qz,arclength,section\n";
    for (std::size_t i = 0; i < ds.samples.size(); ++i)
      out << format_pose_row(static_cast<int>(i), ds.samples[i]) << '\n';
    if (!out)
      throw std::runtime_error("emit_dataset: failed writing poses.csv");
  }

  // Expert zone labels: contiguous runs of equal section, split into
  // sub-classes (largest average run first) until the target count is met.
  struct Run {
    int begin, end;  // inclusive sample range
    std::string name;
    int splits = 1;
  };
  std::vector<Run> runs;
  for (int i = 0; i < ds.size(); ++i) {
    if (runs.empty() || runs.back().name != ds.samples[i].section)
      runs.push_back({i, i, ds.samples[i].section, 1});
    else
      runs.back().end = i;
  }
  int total = static_cast<int>(runs.size());
  while (total < expert_zone_target) {
    int best = -1;
    double best_load = 0;
    for (std::size_t r = 0; r < runs.size(); ++r) {
      const int members = runs[r].end - runs[r].begin + 1;
      if (runs[r].splits >= members) continue;  // cannot split below 1 member per zone
      const double load = double(members) / runs[r].splits;
      if (load > best_load) {
        best_load = load;
        best = static_cast<int>(r);
      }
    }
    if (best < 0) break;
    ++runs[best].splits;
    ++total;
  }
  {
    std::ofstream out(out_dir + "/expert_zones.txt", std::ios::binary);
    for (const auto& r : runs) {
      out << r.begin << ' ' << r.end << ' ' << r.name;
      if (r.splits > 1) out << ':' << r.splits;
      out << '\n';
    }
    if (!out)
      throw std::runtime_error("emit_dataset: failed writing expert_zones.txt");
  }

  {
    std::ofstream out(out_dir + "/manifest.txt", std::ios::binary);
    out << "world_seed=" << world.seed() << '\n';
    out << "n_samples=" << ds.size() << '\n';
    out << "width=" << k.width << '\n' << "height=" << k.height << '\n';
    out << "fx=" << g9(k.fx) << '\n' << "fy=" << g9(k.fy) << '\n';
    out << "cx=" << g9(k.cx) << '\n' << "cy=" << g9(k.cy) << '\n';
    out << "tube_length_mm=" << g9(world.length()) << '\n';
    out << "sections=" << world.sections().size() << '\n';
    out << "expert_zone_target=" << expert_zone_target << '\n';
    if (!out)
      throw std::runtime_error("emit_dataset: failed writing manifest.txt");
  }
  return ds;
}

Dataset load_dataset(const std::string& dir) {
  Dataset ds;
  ds.dir = dir;

  std::ifstream mf(dir + "/manifest.txt");
  if (!mf)
    throw std::runtime_error("load_dataset: missing manifest.txt in " + dir);
  std::string line;
  int n_samples = -1;
  while (std::getline(mf, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = line.substr(0, eq);
    const std::string val = line.substr(eq + 1);
    if (key == "world_seed") ds.world_seed = std::stoull(val);
    else if (key == "n_samples") n_samples = std::stoi(val);
    else if (key == "width") ds.intrinsics.width = std::stoi(val);
    else if (key == "height") ds.intrinsics.height = std::stoi(val);
    else if (key == "fx") ds.intrinsics.fx = std::stod(val);
    else if (key == "fy") ds.intrinsics.fy = std::stod(val);
    else if (key == "cx") ds.intrinsics.cx = std::stod(val);
    else if (key == "cy") ds.intrinsics.cy = std::stod(val);
  }
  ds.intrinsics.validate();

  std::ifstream pf(dir + "/poses.csv");
  if (!pf)
    throw std::runtime_error("load_dataset: missing poses.csv in " + dir);
  std::getline(pf, line);  // header
  while (std::getline(pf, line)) {
    if (line.empty()) continue;
    int index = 0;
    DatasetSample s = parse_pose_row(line, &index);
    if (index != static_cast<int>(ds.samples.size()))
      throw std::runtime_error("load_dataset: non-sequential index in poses.csv");
    ds.samples.push_back(std::move(s));
  }
  if (n_samples >= 0 && n_samples != ds.size())
    throw std::runtime_error("load_dataset: manifest/poses.csv sample count mismatch");
  return ds;
}

Image Dataset::load_image(int index) const {
  return read_pgm(dir + "/" + samples.at(index).image_file);
}

}  // namespace tubeloc::sim

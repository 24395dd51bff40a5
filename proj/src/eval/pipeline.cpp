#include "eval/pipeline.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>

#include "core/rng.hpp"
#include "sim/render.hpp"

namespace tubeloc::eval {

namespace fs = std::filesystem;

namespace {

std::string g9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

template <typename Fn>
auto stage(const std::string& name, Fn&& fn) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;  // already attributed
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

bool dataset_present(const std::string& dir) { return fs::exists(dir + "/manifest.txt"); }

void generate_datasets(const PipelineConfig& c, const Artifacts& a) {
  const auto world = sim::TubeWorld::generate(c.world_seed, c.world);
  const auto k = c.intrinsics();
  const auto train = sim::generate_trajectory(world, c.train_trajectory_seed, c.n_train,
                                              sim::TrajectoryProfile::train());
  sim::emit_dataset(world, train, k, a.train_dataset(c), c.expert_zone_target);
  const auto test = sim::generate_trajectory(world, c.test_trajectory_seed, c.n_test,
                                             sim::TrajectoryProfile::test());
  sim::emit_dataset(world, test, k, a.test_dataset(c), c.expert_zone_target);
}

void ensure_datasets(const PipelineConfig& c, const Artifacts& a) {
  stage("generate", [&] {
    if (!dataset_present(a.train_dataset(c)) || !dataset_present(a.test_dataset(c)))
      generate_datasets(c, a);
  });
}

struct TrainedArtifacts {
  classifier::EmbedModel model;
  classifier::DescriptorDB db;
};

TrainedArtifacts train_in_memory(const PipelineConfig& c, const sim::Dataset& train,
                                 const zones::ZonePartition& partition) {
  const auto rasters = preprocess_all(train, c.input_size);
  const auto zone_of = partition.zone_of_image();
  const auto pairs = classifier::generate_pairs(rasters, zone_of, c.pair_count, c.pairs_seed);
  TrainedArtifacts out;
  out.model = classifier::make_model(c.arch(), c.margin, c.classifier_seed);
  classifier::train(out.model, pairs, c.train);
  out.db = classifier::build_db(out.model, rasters, zone_of);
  return out;
}

void ensure_model(const PipelineConfig& c, const Artifacts& a) {
  if (fs::exists(a.model_file()) && fs::exists(a.db_file())) return;
  stage("train", [&] {
    const auto train_ds = sim::load_dataset(a.train_dataset(c));
    const auto partition = make_partition(c, train_ds);
    const auto trained = train_in_memory(c, train_ds, partition);
    classifier::write_model(a.model_file(), trained.model);
    classifier::write_db(a.db_file(), trained.db);
  });
}

void ensure_maps(const PipelineConfig& c, const Artifacts& a) {
  if (fs::exists(a.maps_dir() + "/manifest.txt")) return;
  stage("build-map", [&] {
    const auto train_ds = sim::load_dataset(a.train_dataset(c));
    auto partition = make_partition(c, train_ds);
    zones::build_all_maps(partition, train_ds, c.m_select, c.delta_r, c.detector);
    zones::write_partition(a.maps_dir(), partition, c.delta_r);
  });
}

}  // namespace

std::string Artifacts::dataset_root(const PipelineConfig& c) const {
  if (c.dataset_dir.empty()) return out_dir + "/dataset";
  if (fs::path(c.dataset_dir).is_absolute()) return c.dataset_dir;
  return out_dir + "/" + c.dataset_dir;
}

zones::ZonePartition make_partition(const PipelineConfig& config, const sim::Dataset& train) {
  if (config.zone_mode == ZoneMode::Expert)
    return zones::partition_from_labels(train, train.dir + "/expert_zones.txt");
  return zones::partition_uniform(train, config.n_zones);
}

std::vector<std::shared_ptr<const classifier::Raster>> preprocess_all(const sim::Dataset& ds,
                                                                      int input_size) {
  std::vector<std::shared_ptr<const classifier::Raster>> out;
  out.reserve(ds.size());
  for (int i = 0; i < ds.size(); ++i)
    out.push_back(std::make_shared<classifier::Raster>(
        classifier::preprocess(ds.load_image(i), input_size)));
  return out;
}

ErrorReport localize_all(const PipelineConfig& config, const sim::Dataset& test,
                         const classifier::EmbedModel& model, const classifier::DescriptorDB& db,
                         const zones::ZonePartition& partition, int test_stride, int perturb_e) {
  const auto k = test.intrinsics;
  const auto lc = config.localize_config();
  const int n_zones = static_cast<int>(partition.zones.size());
  std::vector<PerImageResult> rows;
  for (int i = 0; i < test.size(); i += test_stride) {
    const Image img = test.load_image(i);
    const auto cls = classifier::classify(model, db, img);
    int zone = cls.zone_id;
    if (perturb_e != 0) {
      const int shift = (i % 2 == 0) ? perturb_e : -perturb_e;
      zone = std::clamp(zone + shift, 0, n_zones - 1);
    }
    auto res = zones::localize_in_zone(img, zone, partition, k, lc);
    res.classify_distance = cls.distance;

    const geom::Pose& truth = test.samples[i].pose;
    PerImageResult row;
    row.index = i;
    row.status = res.status;
    row.zone_id = res.zone_id;
    row.n_matches = res.n_matches;
    row.rms = res.final_rms;
    row.classification_only = pose_errors(res.initial_pose, truth);
    if (res.refined_pose) row.refined = pose_errors(*res.refined_pose, truth);
    row.headline = row.refined ? *row.refined : row.classification_only;
    row.estimate = res.best_pose();
    rows.push_back(std::move(row));
  }
  return make_report(std::move(rows));
}

void write_report_csvs(const Artifacts& a, const ErrorReport& report, const sim::Dataset& test,
                       const zones::ZonePartition& partition) {
  {
    std::ofstream out(a.per_image_csv(), std::ios::binary);
    out << "index,status,zone_id,n_matches,rms_px,classonly_pos_mm,classonly_ori_deg,"
           "refined_pos_mm,refined_ori_deg,headline_pos_mm,headline_ori_deg\n";
    for (const auto& r : report.rows) {
      out << r.index << ',' << zones::to_string(r.status) << ',' << r.zone_id << ','
          << r.n_matches << ',' << g9(r.rms) << ',' << g9(r.classification_only.position_mm)
          << ',' << g9(r.classification_only.orientation_deg) << ',';
      if (r.refined)
        out << g9(r.refined->position_mm) << ',' << g9(r.refined->orientation_deg);
      else
        out << ',';
      out << ',' << g9(r.headline.position_mm) << ',' << g9(r.headline.orientation_deg) << '\n';
    }
  }
  {
    std::ofstream out(a.estimated_poses_csv(), std::ios::binary);
    out << "index,timestamp,px,py,pz,qw,qx,qy,qz,arclength,section\n";
    for (const auto& r : report.rows) {
      sim::DatasetSample s;
      s.pose = r.estimate;
      s.timestamp = test.samples[r.index].timestamp;
      s.arclength = test.samples[r.index].arclength;
      s.section = partition.zones[r.zone_id].label;
      out << sim::format_pose_row(r.index, s) << '\n';
    }
  }
  {
    std::ofstream out(a.summary_csv(), std::ios::binary);
    out << "metric,count,mean,median,q1,q3,min,max\n";
    auto row = [&](const char* name, const Aggregates& g) {
      out << name << ',' << g.count << ',' << g9(g.mean) << ',' << g9(g.median) << ','
          << g9(g.q1) << ',' << g9(g.q3) << ',' << g9(g.min) << ',' << g9(g.max) << '\n';
    };
    row("headline_position_mm", report.headline_pos);
    row("headline_orientation_deg", report.headline_ori);
    row("classification_only_position_mm", report.classonly_pos);
    row("classification_only_orientation_deg", report.classonly_ori);
    row("refined_position_mm", report.refined_pos);
    row("refined_orientation_deg", report.refined_ori);
  }
  {
    std::ofstream out(a.counts_csv(), std::ios::binary);
    out << "status,count\n";
    out << "refined," << report.n_refined << '\n';
    out << "classification_only," << report.n_classification_only << '\n';
    out << "rejected," << report.n_rejected << '\n';
  }
}

void run_generate(const PipelineConfig& config, const std::string& out_dir) {
  const Artifacts a(out_dir);
  stage("generate", [&] {
    fs::create_directories(out_dir);
    generate_datasets(config, a);
  });
}

void run_train(const PipelineConfig& config, const std::string& out_dir) {
  const Artifacts a(out_dir);
  fs::create_directories(out_dir);
  ensure_datasets(config, a);
  stage("train", [&] {
    const auto train_ds = sim::load_dataset(a.train_dataset(config));
    const auto partition = make_partition(config, train_ds);
    const auto trained = train_in_memory(config, train_ds, partition);
    classifier::write_model(a.model_file(), trained.model);
    classifier::write_db(a.db_file(), trained.db);
  });
}

void run_build_map(const PipelineConfig& config, const std::string& out_dir) {
  const Artifacts a(out_dir);
  fs::create_directories(out_dir);
  ensure_datasets(config, a);
  stage("build-map", [&] {
    const auto train_ds = sim::load_dataset(a.train_dataset(config));
    auto partition = make_partition(config, train_ds);
    zones::build_all_maps(partition, train_ds, config.m_select, config.delta_r, config.detector);
    zones::write_partition(a.maps_dir(), partition, config.delta_r);
  });
}

ErrorReport run_localize(const PipelineConfig& config, const std::string& out_dir) {
  const Artifacts a(out_dir);
  fs::create_directories(out_dir);
  ensure_datasets(config, a);
  ensure_model(config, a);
  ensure_maps(config, a);
  return stage("localize", [&] {
    const auto test_ds = sim::load_dataset(a.test_dataset(config));
    const auto model = classifier::read_model(a.model_file());
    const auto db = classifier::read_db(a.db_file());
    const auto partition = zones::read_partition(a.maps_dir());
    const auto report = localize_all(config, test_ds, model, db, partition);
    write_report_csvs(a, report, test_ds, partition);
    return report;
  });
}

ErrorReport run_evaluate(const PipelineConfig& config, const std::string& out_dir) {
  const Artifacts a(out_dir);
  fs::create_directories(out_dir);
  ensure_datasets(config, a);
  stage("train", [&] {
    const auto train_ds = sim::load_dataset(a.train_dataset(config));
    const auto partition = make_partition(config, train_ds);
    const auto trained = train_in_memory(config, train_ds, partition);
    classifier::write_model(a.model_file(), trained.model);
    classifier::write_db(a.db_file(), trained.db);
  });
  stage("build-map", [&] {
    const auto train_ds = sim::load_dataset(a.train_dataset(config));
    auto partition = make_partition(config, train_ds);
    zones::build_all_maps(partition, train_ds, config.m_select, config.delta_r, config.detector);
    zones::write_partition(a.maps_dir(), partition, config.delta_r);
  });
  return stage("localize", [&] {
    const auto test_ds = sim::load_dataset(a.test_dataset(config));
    const auto model = classifier::read_model(a.model_file());
    const auto db = classifier::read_db(a.db_file());
    const auto partition = zones::read_partition(a.maps_dir());
    const auto report = localize_all(config, test_ds, model, db, partition);
    write_report_csvs(a, report, test_ds, partition);
    return report;
  });
}

}  // namespace tubeloc::eval

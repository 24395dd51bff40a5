#include "eval/sweep.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "core/rng.hpp"

namespace tubeloc::eval {

namespace fs = std::filesystem;

namespace {

std::string g9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace

SweepResult run_sweep(const PipelineConfig& config, const std::string& out_dir) {
  const Artifacts a(out_dir);
  fs::create_directories(out_dir);
  if (config.sweep_repeats < 1)
    throw StageError("sweep", "repeats must be >= 1");

  // Shared dataset across all cells.
  if (!fs::exists(a.train_dataset(config) + "/manifest.txt") ||
      !fs::exists(a.test_dataset(config) + "/manifest.txt"))
    run_generate(config, out_dir);
  const auto train_ds = sim::load_dataset(a.train_dataset(config));
  const auto test_ds = sim::load_dataset(a.test_dataset(config));
  const auto rasters = preprocess_all(train_ds, config.input_size);

  SweepResult result;
  for (int n_zones : config.sweep_zone_counts) {
    for (int repeat = 0; repeat < config.sweep_repeats; ++repeat) {
      SweepCell cell;
      cell.n_zones = n_zones;
      cell.repeat = repeat;
      cell.cell_seed = mix_seed(config.classifier_seed, static_cast<std::uint64_t>(n_zones),
                                static_cast<std::uint64_t>(repeat));
      try {
        PipelineConfig cc = config;
        cc.zone_mode = ZoneMode::Uniform;
        cc.n_zones = n_zones;
        cc.classifier_seed = cell.cell_seed;
        cc.pairs_seed = mix_seed(config.pairs_seed, cell.cell_seed);
        cc.train.epochs = config.sweep_epochs;
        cc.train.seed = cell.cell_seed;
        cc.pair_count = config.sweep_pairs;

        auto partition = zones::partition_uniform(train_ds, n_zones);
        const auto zone_of = partition.zone_of_image();
        const auto pairs =
            classifier::generate_pairs(rasters, zone_of, cc.pair_count, cc.pairs_seed);
        auto model = classifier::make_model(cc.arch(), cc.margin, cc.classifier_seed);
        classifier::train(model, pairs, cc.train);
        const auto db = classifier::build_db(model, rasters, zone_of);
        zones::build_all_maps(partition, train_ds, cc.m_select, cc.delta_r, cc.detector);
        cell.report = localize_all(cc, test_ds, model, db, partition, config.sweep_test_stride);
        cell.ok = true;
      } catch (const std::exception& e) {
        cell.ok = false;
        cell.error = e.what();
      }
      result.cells.push_back(std::move(cell));
    }
  }

  {
    std::ofstream out(a.sweep_cells_csv(), std::ios::binary);
    out << "n_zones,repeat,cell_seed,status,n_refined,n_classification_only,n_rejected,"
           "mean_pos_mm,median_pos_mm,mean_ori_deg,median_ori_deg\n";
    for (const auto& c : result.cells) {
      out << c.n_zones << ',' << c.repeat << ',' << c.cell_seed << ','
          << (c.ok ? "ok" : "failed") << ',';
      if (c.ok) {
        out << c.report.n_refined << ',' << c.report.n_classification_only << ','
            << c.report.n_rejected << ',' << g9(c.report.headline_pos.mean) << ','
            << g9(c.report.headline_pos.median) << ',' << g9(c.report.headline_ori.mean) << ','
            << g9(c.report.headline_ori.median);
      } else {
        out << ",,,,,,";
      }
      out << '\n';
    }
  }
  {
    std::ofstream out(a.sweep_box_csv(), std::ios::binary);
    out << "n_zones,pos_min,pos_q1,pos_median,pos_q3,pos_max,"
           "ori_min,ori_q1,ori_median,ori_q3,ori_max,n_ok\n";
    for (int n_zones : config.sweep_zone_counts) {
      std::vector<double> pos, ori;
      for (const auto& c : result.cells)
        if (c.n_zones == n_zones && c.ok) {
          pos.push_back(c.report.headline_pos.mean);
          ori.push_back(c.report.headline_ori.mean);
        }
      const auto gp = aggregate(pos);
      const auto go = aggregate(ori);
      out << n_zones << ',' << g9(gp.min) << ',' << g9(gp.q1) << ',' << g9(gp.median) << ','
          << g9(gp.q3) << ',' << g9(gp.max) << ',' << g9(go.min) << ',' << g9(go.q1) << ','
          << g9(go.median) << ',' << g9(go.q3) << ',' << g9(go.max) << ',' << gp.count << '\n';
    }
  }
  return result;
}

PerturbResult run_perturb(const PipelineConfig& config, const std::string& out_dir) {
  if (std::find(config.perturb_e_values.begin(), config.perturb_e_values.end(), 0) ==
      config.perturb_e_values.end())
    throw StageError("perturb", "e_values must include 0");
  const Artifacts a(out_dir);

  // The e=0 row must replay the plain pipeline bit-exactly, so go through the
  // same artifact path.
  run_evaluate(config, out_dir);
  const auto test_ds = sim::load_dataset(a.test_dataset(config));
  const auto model = classifier::read_model(a.model_file());
  const auto db = classifier::read_db(a.db_file());
  const auto partition = zones::read_partition(a.maps_dir());

  PerturbResult result;
  for (int e : config.perturb_e_values) {
    PerturbRow row;
    row.e = e;
    row.report = localize_all(config, test_ds, model, db, partition, 1, e);
    result.rows.push_back(std::move(row));
  }

  std::ofstream out(a.perturb_csv(), std::ios::binary);
  out << "e,n_refined,n_classification_only,n_rejected,"
         "mean_pos_mm,median_pos_mm,mean_ori_deg,median_ori_deg\n";
  for (const auto& r : result.rows) {
    out << r.e << ',' << r.report.n_refined << ',' << r.report.n_classification_only << ','
        << r.report.n_rejected << ',' << g9(r.report.headline_pos.mean) << ','
        << g9(r.report.headline_pos.median) << ',' << g9(r.report.headline_ori.mean) << ','
        << g9(r.report.headline_ori.median) << '\n';
  }
  return result;
}

}  // namespace tubeloc::eval

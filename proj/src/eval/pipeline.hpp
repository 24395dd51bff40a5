// Stage orchestration over on-disk artifacts: generate, train, build-map,
// localize, evaluate. Every stage is deterministic given the config; stages
// recompute their own outputs and reuse existing upstream artifacts.
#pragma once

#include <stdexcept>
#include <string>

#include "classifier/db.hpp"
#include "classifier/model_io.hpp"
#include "eval/config.hpp"
#include "eval/metrics.hpp"

namespace tubeloc::eval {

// Pipeline failures carry the stage that raised them.
class StageError : public std::runtime_error {
 public:
  StageError(const std::string& stage, const std::string& message)
      : std::runtime_error("stage '" + stage + "': " + message), stage_(stage) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

// Artifact layout under an output directory.
struct Artifacts {
  std::string out_dir;
  explicit Artifacts(std::string dir) : out_dir(std::move(dir)) {}

  std::string dataset_root(const PipelineConfig& c) const;
  std::string train_dataset(const PipelineConfig& c) const { return dataset_root(c) + "/train"; }
  std::string test_dataset(const PipelineConfig& c) const { return dataset_root(c) + "/test"; }
  std::string model_file() const { return out_dir + "/model.bin"; }
  std::string db_file() const { return out_dir + "/descriptor_db.txt"; }
  std::string maps_dir() const { return out_dir + "/maps"; }
  std::string per_image_csv() const { return out_dir + "/per_image.csv"; }
  std::string estimated_poses_csv() const { return out_dir + "/estimated_poses.csv"; }
  std::string summary_csv() const { return out_dir + "/summary.csv"; }
  std::string counts_csv() const { return out_dir + "/counts.csv"; }
  std::string sweep_cells_csv() const { return out_dir + "/sweep_cells.csv"; }
  std::string sweep_box_csv() const { return out_dir + "/sweep_box.csv"; }
  std::string perturb_csv() const { return out_dir + "/perturb.csv"; }
};

// Stage entry points (the CLI subcommands call straight into these).
void run_generate(const PipelineConfig& config, const std::string& out_dir);
void run_train(const PipelineConfig& config, const std::string& out_dir);
void run_build_map(const PipelineConfig& config, const std::string& out_dir);
ErrorReport run_localize(const PipelineConfig& config, const std::string& out_dir);
ErrorReport run_evaluate(const PipelineConfig& config, const std::string& out_dir);

// Shared helpers (also used by the sweep and perturbation studies).
zones::ZonePartition make_partition(const PipelineConfig& config, const sim::Dataset& train);
std::vector<std::shared_ptr<const classifier::Raster>> preprocess_all(const sim::Dataset& ds,
                                                                      int input_size);
ErrorReport localize_all(const PipelineConfig& config, const sim::Dataset& test,
                         const classifier::EmbedModel& model, const classifier::DescriptorDB& db,
                         const zones::ZonePartition& partition, int test_stride = 1,
                         int perturb_e = 0);

void write_report_csvs(const Artifacts& a, const ErrorReport& report, const sim::Dataset& test,
                       const zones::ZonePartition& partition);

}  // namespace tubeloc::eval

// Pipeline configuration: one JSON file drives every CLI stage.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "classifier/train.hpp"
#include "features/types.hpp"
#include "geom/camera.hpp"
#include "sim/world.hpp"
#include "zones/localize.hpp"

namespace tubeloc::eval {

enum class ZoneMode { Uniform, Expert };

struct PipelineConfig {
  // seeds
  std::uint64_t world_seed = 7;
  std::uint64_t train_trajectory_seed = 101;
  std::uint64_t test_trajectory_seed = 202;
  std::uint64_t classifier_seed = 4242;
  std::uint64_t pairs_seed = 99;

  sim::WorldConfig world;

  // camera (rendered frames; the classifier preprocesses down to input_size)
  int image_size = 128;
  double fov_deg = 90.0;

  // dataset
  int n_train = 600;
  int n_test = 600;
  int expert_zone_target = 50;
  std::string dataset_dir;  // default <out>/dataset; relative paths resolve under <out>

  features::DetectorParams detector{.response_threshold = 2.0, .octaves = 4, .levels = 6,
                                    .ratio = 0.7};

  // classifier
  int input_size = 64;
  double margin = 1.0;
  int pair_count = 512;
  classifier::TrainConfig train;

  // zones
  ZoneMode zone_mode = ZoneMode::Uniform;
  int n_zones = 50;
  int m_select = 5;
  double delta_r = 10.0;

  // localization thresholds (tuned to the 128 px render scale)
  double max_rms = 4.0;
  double max_jump_factor = 2.0;
  bool refinement_enabled = true;
  double match_gate_px = 24.0;
  double refine_trim_px = 4.0;

  // sweep protocol (desk-scaled zone counts, Monte Carlo repeats)
  std::vector<int> sweep_zone_counts = {5, 10, 15, 20, 25, 30, 35, 40};
  int sweep_repeats = 10;
  int sweep_epochs = 40;
  int sweep_pairs = 256;
  int sweep_test_stride = 4;

  std::vector<int> perturb_e_values = {0, 1, 2};

  geom::CameraIntrinsics intrinsics() const;
  zones::LocalizeConfig localize_config() const;
  classifier::ArchConfig arch() const;

  // Loads defaults overridden by the JSON file; unknown keys are errors.
  static PipelineConfig load(const std::string& path);
  static PipelineConfig from_json_text(const std::string& text);
};

}  // namespace tubeloc::eval

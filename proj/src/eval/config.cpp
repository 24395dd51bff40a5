#include "eval/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace tubeloc::eval {

using nlohmann::json;

geom::CameraIntrinsics PipelineConfig::intrinsics() const {
  geom::CameraIntrinsics k;
  k.width = image_size;
  k.height = image_size;
  k.fx = k.fy = 0.5 * image_size / std::tan(0.5 * fov_deg * std::numbers::pi / 180.0);
  k.cx = 0.5 * image_size;
  k.cy = 0.5 * image_size;
  k.validate();
  return k;
}

zones::LocalizeConfig PipelineConfig::localize_config() const {
  zones::LocalizeConfig c;
  c.detector = detector;
  c.max_rms = max_rms;
  c.max_jump_factor = max_jump_factor;
  c.refinement_enabled = refinement_enabled;
  c.match_gate_px = match_gate_px;
  c.refine_trim_px = refine_trim_px;
  return c;
}

classifier::ArchConfig PipelineConfig::arch() const {
  classifier::ArchConfig a;
  a.input_size = input_size;
  return a;
}

namespace {

void apply_keys(const json& j, const std::string& scope,
                const std::vector<std::pair<std::string, std::function<void(const json&)>>>& keys) {
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const auto& [name, apply] : keys) {
      if (key == name) {
        apply(value);
        known = true;
        break;
      }
    }
    if (!known)
      throw std::invalid_argument("config: unknown key '" + scope + key + "'");
  }
}

}  // namespace

PipelineConfig PipelineConfig::from_json_text(const std::string& text) {
  PipelineConfig c;
  const json j = json::parse(text);

  apply_keys(j, "", {
    {"seeds", [&](const json& v) {
      apply_keys(v, "seeds.", {
        {"world", [&](const json& x) { c.world_seed = x.get<std::uint64_t>(); }},
        {"train_trajectory", [&](const json& x) { c.train_trajectory_seed = x.get<std::uint64_t>(); }},
        {"test_trajectory", [&](const json& x) { c.test_trajectory_seed = x.get<std::uint64_t>(); }},
        {"classifier", [&](const json& x) { c.classifier_seed = x.get<std::uint64_t>(); }},
        {"pairs", [&](const json& x) { c.pairs_seed = x.get<std::uint64_t>(); }},
      });
    }},
    {"world", [&](const json& v) {
      apply_keys(v, "world.", {
        {"length_mm", [&](const json& x) { c.world.length_mm = x.get<double>(); }},
        {"radius_mm", [&](const json& x) { c.world.radius_mm = x.get<double>(); }},
        {"sections", [&](const json& x) { c.world.sections = x.get<int>(); }},
        {"low_texture_sections", [&](const json& x) { c.world.low_texture_sections = x.get<int>(); }},
        {"control_points", [&](const json& x) { c.world.control_points = x.get<int>(); }},
        {"texture_scale_mm", [&](const json& x) { c.world.texture_scale_mm = x.get<double>(); }},
        {"band_wavelength_mm", [&](const json& x) { c.world.band_wavelength_mm = x.get<double>(); }},
      });
    }},
    {"camera", [&](const json& v) {
      apply_keys(v, "camera.", {
        {"image_size", [&](const json& x) { c.image_size = x.get<int>(); }},
        {"fov_deg", [&](const json& x) { c.fov_deg = x.get<double>(); }},
      });
    }},
    {"dataset", [&](const json& v) {
      apply_keys(v, "dataset.", {
        {"n_train", [&](const json& x) { c.n_train = x.get<int>(); }},
        {"n_test", [&](const json& x) { c.n_test = x.get<int>(); }},
        {"expert_zone_target", [&](const json& x) { c.expert_zone_target = x.get<int>(); }},
        {"dir", [&](const json& x) { c.dataset_dir = x.get<std::string>(); }},
      });
    }},
    {"detector", [&](const json& v) {
      apply_keys(v, "detector.", {
        {"response_threshold", [&](const json& x) { c.detector.response_threshold = x.get<double>(); }},
        {"octaves", [&](const json& x) { c.detector.octaves = x.get<int>(); }},
        {"levels", [&](const json& x) { c.detector.levels = x.get<int>(); }},
        {"ratio", [&](const json& x) { c.detector.ratio = x.get<double>(); }},
      });
    }},
    {"classifier", [&](const json& v) {
      apply_keys(v, "classifier.", {
        {"input_size", [&](const json& x) { c.input_size = x.get<int>(); }},
        {"margin", [&](const json& x) { c.margin = x.get<double>(); }},
        {"pair_count", [&](const json& x) { c.pair_count = x.get<int>(); }},
        {"epochs", [&](const json& x) { c.train.epochs = x.get<int>(); }},
        {"batch_size", [&](const json& x) { c.train.batch_size = x.get<int>(); }},
        {"learning_rate", [&](const json& x) { c.train.learning_rate = x.get<double>(); }},
      });
    }},
    {"zones", [&](const json& v) {
      apply_keys(v, "zones.", {
        {"mode", [&](const json& x) {
          const std::string m = x.get<std::string>();
          if (m == "uniform") c.zone_mode = ZoneMode::Uniform;
          else if (m == "expert") c.zone_mode = ZoneMode::Expert;
          else throw std::invalid_argument("config: zones.mode must be 'uniform' or 'expert'");
        }},
        {"n_zones", [&](const json& x) { c.n_zones = x.get<int>(); }},
        {"m_select", [&](const json& x) { c.m_select = x.get<int>(); }},
        {"delta_r", [&](const json& x) { c.delta_r = x.get<double>(); }},
      });
    }},
    {"localize", [&](const json& v) {
      apply_keys(v, "localize.", {
        {"max_rms", [&](const json& x) { c.max_rms = x.get<double>(); }},
        {"max_jump_factor", [&](const json& x) { c.max_jump_factor = x.get<double>(); }},
        {"match_gate_px", [&](const json& x) { c.match_gate_px = x.get<double>(); }},
        {"refine_trim_px", [&](const json& x) { c.refine_trim_px = x.get<double>(); }},
        {"refinement", [&](const json& x) { c.refinement_enabled = x.get<bool>(); }},
      });
    }},
    {"sweep", [&](const json& v) {
      apply_keys(v, "sweep.", {
        {"zone_counts", [&](const json& x) { c.sweep_zone_counts = x.get<std::vector<int>>(); }},
        {"repeats", [&](const json& x) { c.sweep_repeats = x.get<int>(); }},
        {"epochs", [&](const json& x) { c.sweep_epochs = x.get<int>(); }},
        {"pairs", [&](const json& x) { c.sweep_pairs = x.get<int>(); }},
        {"test_stride", [&](const json& x) { c.sweep_test_stride = x.get<int>(); }},
      });
    }},
    {"perturb", [&](const json& v) {
      apply_keys(v, "perturb.", {
        {"e_values", [&](const json& x) { c.perturb_e_values = x.get<std::vector<int>>(); }},
      });
    }},
  });

  c.train.seed = c.classifier_seed;
  return c;
}

PipelineConfig PipelineConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("config: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

}  // namespace tubeloc::eval

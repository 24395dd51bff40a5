// Zone-count Monte Carlo sweep and the forced-misclassification study.
#pragma once

#include "eval/pipeline.hpp"

namespace tubeloc::eval {

struct SweepCell {
  int n_zones = 0;
  int repeat = 0;
  std::uint64_t cell_seed = 0;
  bool ok = false;
  std::string error;  // set when !ok
  ErrorReport report;
};

struct SweepResult {
  std::vector<SweepCell> cells;  // ordered by (n_zones, repeat)
};

// Full pipeline per (zone count x repeat) cell on a shared dataset; repeats
// vary the classifier/pair seeds. Uses the sweep training profile
// (sweep_epochs/sweep_pairs/test stride). Failed cells are recorded and the
// sweep continues. Writes sweep_cells.csv and the box-plot-ready sweep_box.csv
// (min/Q1/median/Q3/max of per-run headline mean errors, per zone count).
SweepResult run_sweep(const PipelineConfig& config, const std::string& out_dir);

struct PerturbRow {
  int e = 0;
  ErrorReport report;
};

struct PerturbResult {
  std::vector<PerturbRow> rows;  // ordered as config.perturb_e_values
};

// Shifts every classified zone index by +e / -e (alternating by image parity,
// clamped to the valid range) before refinement. The e=0 row reproduces the
// unperturbed pipeline bit-exactly. Writes perturb.csv. Requires 0 among the
// e-values.
PerturbResult run_perturb(const PipelineConfig& config, const std::string& out_dir);

}  // namespace tubeloc::eval

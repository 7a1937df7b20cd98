#pragma once

#include <filesystem>

#include "kcover/harness.hpp"
#include "kcover/oracle.hpp"
#include "kcover/parallel.hpp"

namespace kcover {

// Round-trip JSON for placement runs: config snapshot, sensor list (i, j,
// z_s), per-step trace, termination reason, and per-run sub-traces for
// parallel ensembles. Deterministic output: keys are sorted and doubles use
// shortest round-trip formatting.
void save_run_json(const PlacementRun& run, const std::filesystem::path& path);
PlacementRun load_run_json(const std::filesystem::path& path);

// Standalone config files use the same object shape as the "config" block of
// a run JSON. Absent keys keep defaults, so partial files are valid.
GreedyConfig load_greedy_config_json(const std::filesystem::path& path);
void save_greedy_config_json(const GreedyConfig& config, const std::filesystem::path& path);

void save_theorem_report_json(const oracle::TheoremReport& report, const std::filesystem::path& path);

// Gain planes for external consumption: G and V_1..V_k row-major, -1 sentinel
// on non-candidate cells.
void save_gain_field_json(const GainField& field, const std::filesystem::path& path);

// Experiment config as a checked-in JSON file; absent keys keep defaults.
harness::ExperimentConfig load_experiment_config_json(const std::filesystem::path& path);
void save_experiment_config_json(const harness::ExperimentConfig& config, const std::filesystem::path& path);

}  // namespace kcover

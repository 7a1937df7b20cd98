#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "kcover/env.hpp"
#include "kcover/greedy.hpp"

namespace kcover::harness {

// Uniform draws with replacement from the candidate set, one rng draw per
// sensor, ignoring gains for selection but recording the realized gain in the
// trace so curves stay comparable with greedy runs. band_size is the whole
// candidate set.
PlacementRun random_baseline(const Environment& env, const GreedyConfig& config,
                             const CellMask* candidates_override = nullptr);

struct ExperimentConfig {
  int n_envs = 20;
  GridSpec grid{64, 64, 1.0, 1.0};
  CityGenParams city;
  std::vector<std::string> methods{"greedy-sweep", "parallel", "random"};
  std::vector<double> thresholds{0.7, 0.9};
  int k = 3;
  double epsilon = 0.01;
  int max_sensors = 200;
  std::uint64_t master_seed = 1;

  void validate() const;
};

struct ResultRow {
  int env_id = 0;
  std::string method;
  std::uint64_t seed = 0;
  double threshold = 0.0;
  int sensors_needed = 0;  // max_sensors + 1 when censored
  bool censored = false;
  double wall_time_ms = 0.0;
  std::string status = "ok";
};

struct CurveRow {
  int env_id = 0;
  std::string method;
  int step = 0;  // sensors placed so far, 1-based
  std::vector<double> frac;
};

struct ExperimentResults {
  int k = 0;
  std::vector<ResultRow> rows;
  std::vector<CurveRow> curves;
};

// One placement run per (environment, method) cell. Environments come from
// generate_random_city seeded by mix_seed(master_seed, env_index); run seeds
// are mix_seed(master_seed, env_index, fnv1a(method)), so adding or removing
// a method never changes another method's sensors. Cells run concurrently
// under --jobs; output order is fixed (env outer, methods in config order)
// either way. A failing cell becomes rows with its error message as status
// rather than aborting the campaign. with_timing=false zeroes wall_time_ms
// for byte-stable output.
ExperimentResults run_experiment(const ExperimentConfig& config, int jobs = 1, bool with_timing = true);

// methods: greedy-exact | greedy-sweep | parallel | random
PlacementRun run_method(const Environment& env, const std::string& method, const ExperimentConfig& config,
                        std::uint64_t seed);

// First step at which the order-k fraction reaches the threshold, 1-based;
// max_sensors + 1 when it never does.
int sensors_to_threshold(const PlacementRun& run, double threshold, int max_sensors, bool* censored);

void write_results_csv(const ExperimentResults& results, const std::filesystem::path& path);
void write_curves_csv(const ExperimentResults& results, const std::filesystem::path& path);

}  // namespace kcover::harness

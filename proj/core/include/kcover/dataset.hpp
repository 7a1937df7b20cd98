#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "kcover/greedy.hpp"

namespace kcover::harness {

struct DatasetExportConfig {
  int k = 3;
  double epsilon = 0.01;
  double coverage_target = 0.99;
  int max_sensors = 200;
  VisibilityMethod visibility_method = VisibilityMethod::sweep;
  CandidatePolicy candidate_policy = CandidatePolicy::streets;
  std::uint64_t seed = 0;

  void validate() const;
};

struct DatasetRecordInfo {
  std::string path;  // relative to the manifest's directory
  int env_index = 0;
  int step = 0;
  double epsilon = 0.0;
  std::uint64_t seed = 0;
};

struct DatasetManifest {
  int format_version = 1;
  GridSpec grid;
  int k = 0;
  std::vector<double> weights;
  double coverage_target = 0.0;
  std::string visibility_method;
  std::string candidate_policy;
  std::vector<DatasetRecordInfo> records;
};

// One record: the greedy state and its per-candidate labels at one step.
// inputs = h_obs plane + psi_1..psi_k planes, labels = G plane + V_1..V_k
// planes; non-candidate label cells hold -1. Planes are row-major float32.
struct DatasetRecord {
  std::vector<float> inputs;
  std::vector<float> labels;
};

// Runs the greedy placement per environment to the coverage target (stopping
// early on zero gain or the cap) and writes one record per placed sensor,
// capturing the state *before* that sensor. All state the run ever consults
// is held in float32: heights are quantized up front and the psi stack is
// re-quantized after every insertion, so labels recomputed from a stored
// record reproduce the stored label planes bit for bit. Requires z_max to be
// exactly representable in float32. Records go to out_dir as one .bin per
// record (little-endian) plus manifest.json.
DatasetManifest export_training_dataset(const std::vector<Environment>& envs, const DatasetExportConfig& config,
                                        const std::filesystem::path& out_dir);

void save_dataset_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);
DatasetManifest load_dataset_manifest(const std::filesystem::path& path);

DatasetRecord load_dataset_record(const std::filesystem::path& path, const GridSpec& grid, int k);
void save_dataset_record(const DatasetRecord& record, const std::filesystem::path& path);

// Recomputes a record's label planes from its input planes alone.
DatasetRecord regenerate_labels(const DatasetRecord& record, const DatasetManifest& manifest);

// Singular values of the record matrix: one row per record (the flattened
// input planes), mean row subtracted. Computed from the N x N Gram matrix,
// non-increasing. Label planes are excluded.
std::vector<double> dataset_spectrum(const std::filesystem::path& manifest_path,
                                     int max_records = 1 << 30);
std::vector<double> dataset_spectrum(const DatasetManifest& manifest, const std::filesystem::path& base_dir,
                                     int max_records = 1 << 30);

}  // namespace kcover::harness

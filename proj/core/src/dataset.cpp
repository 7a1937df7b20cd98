#include "kcover/dataset.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace kcover::harness {

using nlohmann::json;

void DatasetExportConfig::validate() const {
  if (k < 1) throw InvalidArgument("dataset: k must be >= 1");
  if (!(epsilon >= 0.0) || !(epsilon < 1.0)) throw InvalidArgument("dataset: epsilon must be in [0, 1)");
  if (!(coverage_target > 0.0) || !(coverage_target < 1.0))
    throw InvalidArgument("dataset: coverage_target must be in (0, 1)");
  if (max_sensors < 1) throw InvalidArgument("dataset: max_sensors must be >= 1");
}

namespace {

void write_f32_le(std::ofstream& out, const std::vector<float>& values) {
  static_assert(sizeof(float) == 4);
  if constexpr (std::endian::native == std::endian::little) {
    out.write(reinterpret_cast<const char*>(values.data()), static_cast<std::streamsize>(values.size() * 4));
  } else {
    for (float f : values) {
      std::uint32_t u;
      std::memcpy(&u, &f, 4);
      const char b[4] = {static_cast<char>(u), static_cast<char>(u >> 8), static_cast<char>(u >> 16),
                         static_cast<char>(u >> 24)};
      out.write(b, 4);
    }
  }
}

void read_f32_le(std::ifstream& in, std::vector<float>& values) {
  if constexpr (std::endian::native == std::endian::little) {
    in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(values.size() * 4));
  } else {
    for (float& f : values) {
      unsigned char b[4];
      in.read(reinterpret_cast<char*>(b), 4);
      const std::uint32_t u = static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
                              (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
      std::memcpy(&f, &u, 4);
    }
  }
}

Environment quantize_environment(const Environment& env) {
  if (static_cast<double>(static_cast<float>(env.z_max())) != env.z_max())
    throw InvalidArgument("dataset export: z_max must be exactly representable in float32");
  std::vector<double> h(env.heights().size());
  for (std::size_t c = 0; c < h.size(); ++c) h[c] = static_cast<double>(static_cast<float>(env.heights()[c]));
  return make_environment(env.spec(), std::move(h));
}

void quantize_stack(PsiStack& stack) {
  for (double& v : stack.mutable_data()) v = static_cast<double>(static_cast<float>(v));
}

}  // namespace

void save_dataset_record(const DatasetRecord& record, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("save_dataset_record: cannot open " + path.string());
  write_f32_le(out, record.inputs);
  write_f32_le(out, record.labels);
  if (!out) throw IoError("save_dataset_record: write failed for " + path.string());
}

DatasetRecord load_dataset_record(const std::filesystem::path& path, const GridSpec& grid, int k) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("load_dataset_record: cannot open " + path.string());
  const std::size_t plane = grid.cell_count();
  DatasetRecord record;
  record.inputs.resize((1 + static_cast<std::size_t>(k)) * plane);
  record.labels.resize((1 + static_cast<std::size_t>(k)) * plane);
  read_f32_le(in, record.inputs);
  read_f32_le(in, record.labels);
  if (!in) throw IoError("load_dataset_record: truncated record " + path.string());
  return record;
}

DatasetManifest export_training_dataset(const std::vector<Environment>& envs, const DatasetExportConfig& config,
                                        const std::filesystem::path& out_dir) {
  config.validate();
  if (envs.empty()) throw InvalidArgument("dataset export: no environments");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  const Weights weights = Weights::halving(config.k);

  DatasetManifest manifest;
  manifest.grid = envs.front().spec();
  manifest.k = config.k;
  manifest.weights = weights.w;
  manifest.coverage_target = config.coverage_target;
  manifest.visibility_method = to_string(config.visibility_method);
  manifest.candidate_policy = to_string(config.candidate_policy);

  const std::size_t plane = manifest.grid.cell_count();
  int record_index = 0;
  for (std::size_t e = 0; e < envs.size(); ++e) {
    if (!(envs[e].spec() == manifest.grid)) throw GridMismatch("dataset export: environments on different grids");
    const Environment env = quantize_environment(envs[e]);
    const CellMask candidates = candidate_mask(env, config.candidate_policy);
    if (candidates.count() == 0) throw EmptyCandidateSet("dataset export: no candidate cells");
    const std::uint64_t run_seed = mix_seed(config.seed, e);
    Rng rng(run_seed);
    PsiStack stack(env.nx(), env.ny(), config.k, env.z_max());

    int placed = 0;
    while (true) {
      const GainField gf = gain_field(env, stack, weights, candidates, config.visibility_method);
      if (gf.max_gain <= kZeroGainTolerance) break;

      DatasetRecord record;
      record.inputs.reserve((1 + static_cast<std::size_t>(config.k)) * plane);
      record.labels.reserve((1 + static_cast<std::size_t>(config.k)) * plane);
      for (std::size_t c = 0; c < plane; ++c) record.inputs.push_back(static_cast<float>(env.heights()[c]));
      for (int i = 0; i < config.k; ++i)
        for (std::size_t c = 0; c < plane; ++c) record.inputs.push_back(static_cast<float>(stack.psi(c, i)));
      for (std::size_t c = 0; c < plane; ++c)
        record.labels.push_back(candidates.v[c] ? static_cast<float>(gf.G[c]) : -1.0f);
      for (int i = 0; i < config.k; ++i)
        for (std::size_t c = 0; c < plane; ++c)
          record.labels.push_back(candidates.v[c] ? static_cast<float>(gf.V[static_cast<std::size_t>(i) * plane + c])
                                                  : -1.0f);

      char name[32];
      std::snprintf(name, sizeof name, "record_%06d.bin", record_index);
      save_dataset_record(record, out_dir / name);
      manifest.records.push_back({name, static_cast<int>(e), placed, config.epsilon, run_seed});
      ++record_index;

      const Cell cell = select_epsilon_band(gf, config.epsilon, rng);
      const SensorPose pose{cell, env.height(cell.i, cell.j)};
      stack.insert_field(occlusion_field(env, pose, config.visibility_method));
      quantize_stack(stack);
      ++placed;
      if (coverage_fraction(stack, env, config.k) >= config.coverage_target) break;
      if (placed >= config.max_sensors) break;
    }
  }

  save_dataset_manifest(manifest, out_dir / "manifest.json");
  return manifest;
}

void save_dataset_manifest(const DatasetManifest& manifest, const std::filesystem::path& path) {
  json j;
  j["format_version"] = manifest.format_version;
  j["grid"] = {{"nx", manifest.grid.nx},
               {"ny", manifest.grid.ny},
               {"cell_size", manifest.grid.cell_size},
               {"z_max", manifest.grid.z_max}};
  j["k"] = manifest.k;
  j["weights"] = manifest.weights;
  j["coverage_target"] = manifest.coverage_target;
  j["visibility_method"] = manifest.visibility_method;
  j["candidate_policy"] = manifest.candidate_policy;
  json records = json::array();
  for (const DatasetRecordInfo& r : manifest.records) {
    records.push_back(
        {{"path", r.path}, {"env_index", r.env_index}, {"step", r.step}, {"epsilon", r.epsilon}, {"seed", r.seed}});
  }
  j["records"] = std::move(records);
  std::ofstream out(path);
  if (!out) throw IoError("save_dataset_manifest: cannot open " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw IoError("save_dataset_manifest: write failed for " + path.string());
}

DatasetManifest load_dataset_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("load_dataset_manifest: cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError(-1, -1, "load_dataset_manifest: " + std::string(e.what()));
  }
  try {
    DatasetManifest m;
    m.format_version = j.at("format_version").get<int>();
    m.grid.nx = j.at("grid").at("nx").get<int>();
    m.grid.ny = j.at("grid").at("ny").get<int>();
    m.grid.cell_size = j.at("grid").at("cell_size").get<double>();
    m.grid.z_max = j.at("grid").at("z_max").get<double>();
    m.k = j.at("k").get<int>();
    m.weights = j.at("weights").get<std::vector<double>>();
    m.coverage_target = j.at("coverage_target").get<double>();
    m.visibility_method = j.at("visibility_method").get<std::string>();
    m.candidate_policy = j.at("candidate_policy").get<std::string>();
    for (const json& r : j.at("records")) {
      m.records.push_back({r.at("path").get<std::string>(), r.at("env_index").get<int>(), r.at("step").get<int>(),
                           r.at("epsilon").get<double>(), r.at("seed").get<std::uint64_t>()});
    }
    return m;
  } catch (const json::exception& e) {
    throw ParseError(-1, -1, "load_dataset_manifest: missing or mistyped field: " + std::string(e.what()));
  }
}

DatasetRecord regenerate_labels(const DatasetRecord& record, const DatasetManifest& manifest) {
  const std::size_t plane = manifest.grid.cell_count();
  const int k = manifest.k;
  std::vector<double> h(plane);
  for (std::size_t c = 0; c < plane; ++c) h[c] = static_cast<double>(record.inputs[c]);
  const Environment env = make_environment(manifest.grid, std::move(h));
  PsiStack stack(env.nx(), env.ny(), k, env.z_max());
  for (std::size_t c = 0; c < plane; ++c)
    for (int i = 0; i < k; ++i)
      stack.mutable_data()[c * k + i] = static_cast<double>(record.inputs[(1 + static_cast<std::size_t>(i)) * plane + c]);

  const CellMask candidates = candidate_mask(env, parse_candidate_policy(manifest.candidate_policy));
  const GainField gf = gain_field(env, stack, Weights(manifest.weights), candidates,
                                  parse_visibility_method(manifest.visibility_method));
  DatasetRecord out;
  out.inputs = record.inputs;
  out.labels.reserve((1 + static_cast<std::size_t>(k)) * plane);
  for (std::size_t c = 0; c < plane; ++c)
    out.labels.push_back(candidates.v[c] ? static_cast<float>(gf.G[c]) : -1.0f);
  for (int i = 0; i < k; ++i)
    for (std::size_t c = 0; c < plane; ++c)
      out.labels.push_back(candidates.v[c] ? static_cast<float>(gf.V[static_cast<std::size_t>(i) * plane + c])
                                           : -1.0f);
  return out;
}

std::vector<double> dataset_spectrum(const DatasetManifest& manifest, const std::filesystem::path& base_dir,
                                     int max_records) {
  const int n = std::min<int>(max_records, static_cast<int>(manifest.records.size()));
  if (n < 2) throw TooFewRecords("dataset_spectrum: need at least 2 records, have " + std::to_string(n));
  const std::size_t plane = manifest.grid.cell_count();
  const std::size_t dim = (1 + static_cast<std::size_t>(manifest.k)) * plane;

  Eigen::MatrixXd rows(n, static_cast<Eigen::Index>(dim));
  for (int r = 0; r < n; ++r) {
    const DatasetRecord rec = load_dataset_record(base_dir / manifest.records[static_cast<std::size_t>(r)].path,
                                                  manifest.grid, manifest.k);
    for (std::size_t d = 0; d < dim; ++d) rows(r, static_cast<Eigen::Index>(d)) = rec.inputs[d];
  }
  const Eigen::RowVectorXd mean = rows.colwise().mean();
  rows.rowwise() -= mean;
  const Eigen::MatrixXd gram = rows * rows.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
  if (solver.info() != Eigen::Success) throw Error("dataset_spectrum: eigendecomposition failed");
  std::vector<double> sv(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) sv[static_cast<std::size_t>(i)] = std::sqrt(std::max(0.0, solver.eigenvalues()[n - 1 - i]));
  return sv;
}

std::vector<double> dataset_spectrum(const std::filesystem::path& manifest_path, int max_records) {
  const DatasetManifest manifest = load_dataset_manifest(manifest_path);
  return dataset_spectrum(manifest, manifest_path.parent_path(), max_records);
}

}  // namespace kcover::harness

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "kcover/dataset.hpp"
#include "kcover/env.hpp"
#include "kcover/errors.hpp"
#include "kcover/harness.hpp"
#include "kcover/run_io.hpp"

#include "support/test_support.hpp"

using namespace kcover;
using testing::flat_env;
using testing::random_heights_env;

namespace {

namespace fs = std::filesystem;

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("kcover_harness_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

GreedyConfig base_config(int k) {
  GreedyConfig c;
  c.k = k;
  c.weights = Weights::halving(k);
  c.tau = 0.9;
  c.epsilon = 0.0;
  c.max_sensors = 50;
  c.seed = 7;
  return c;
}

harness::ExperimentConfig flat_campaign(int nx, int ny) {
  harness::ExperimentConfig c;
  c.n_envs = 1;
  c.grid = GridSpec{nx, ny, 1.0, 1.0};
  c.city.n_rect_range = {0, 0};
  c.methods = {"greedy-exact", "greedy-sweep", "parallel", "random"};
  c.k = 3;
  c.epsilon = 0.0;
  c.max_sensors = 30;
  c.master_seed = 5;
  return c;
}

}  // namespace

TEST_CASE("random baseline: flat world needs exactly k draws") {
  const Environment env = flat_env(8, 8);
  const GreedyConfig c = base_config(3);
  const PlacementRun run = harness::random_baseline(env, c);
  CHECK(run.method == "random");
  CHECK(run.sensors.size() == 3);
  CHECK(run.terminated_by == TerminatedBy::threshold);
  CHECK(run.trace.back().frac == std::vector<double>{1.0, 1.0, 1.0});
  // Realized gains are recorded: the first draw gains the whole free volume.
  CHECK(run.trace.front().gain == doctest::Approx(env.free_volume()).epsilon(1e-15));
  for (const TraceStep& s : run.trace) CHECK(s.band_size == 64);
}

TEST_CASE("random baseline: a single street cell is drawn every time") {
  GridSpec spec{5, 5, 1.0, 1.0};
  std::vector<double> h(25, 1.0);
  h[GridSpec{5, 5, 1.0, 1.0}.index(2, 3)] = 0.0;
  const Environment env = make_environment(spec, h);
  const GreedyConfig c = base_config(3);
  const PlacementRun run = harness::random_baseline(env, c);
  REQUIRE(run.sensors.size() == 3);
  for (const SensorPose& p : run.sensors) CHECK(p.cell == Cell{2, 3});
  CHECK(run.trace.back().frac.back() == 1.0);
}

TEST_CASE("random baseline: determinism and empty candidates") {
  const Environment env = random_heights_env(81, 10, 10, 1.0, 0.6);
  const GreedyConfig c = base_config(2);
  const PlacementRun a = harness::random_baseline(env, c);
  const PlacementRun b = harness::random_baseline(env, c);
  CHECK(a.sensors == b.sensors);

  GridSpec spec{4, 4, 1.0, 1.0};
  const Environment walled = make_environment(spec, std::vector<double>(16, 0.5));
  CHECK_THROWS_AS(harness::random_baseline(walled, c), EmptyCandidateSet);
}

TEST_CASE("sensors to threshold on a synthetic trace") {
  PlacementRun run;
  run.trace.push_back(TraceStep{{0.5, 0.2}, {0, 0}, 1.0, 1});
  run.trace.push_back(TraceStep{{0.8, 0.7}, {1, 0}, 1.0, 1});
  run.trace.push_back(TraceStep{{0.9, 0.9}, {2, 0}, 1.0, 1});
  bool censored = true;
  // The last entry of frac is the order-k fraction.
  CHECK(harness::sensors_to_threshold(run, 0.7, 10, &censored) == 2);
  CHECK(!censored);
  CHECK(harness::sensors_to_threshold(run, 0.9, 10, &censored) == 3);
  CHECK(!censored);
  CHECK(harness::sensors_to_threshold(run, 0.95, 10, &censored) == 11);
  CHECK(censored);
}

TEST_CASE("run_method rejects unknown names") {
  const Environment env = flat_env(4, 4);
  harness::ExperimentConfig c = flat_campaign(4, 4);
  CHECK_THROWS_AS(harness::run_method(env, "simulated-annealing", c, 1), InvalidArgument);
}

TEST_CASE("campaign on a flat world: every method needs exactly k sensors") {
  const harness::ExperimentConfig c = flat_campaign(8, 8);
  const harness::ExperimentResults results = harness::run_experiment(c, 1, false);
  CHECK(results.k == 3);
  REQUIRE(results.rows.size() == 4 * 2);  // methods x thresholds
  for (const harness::ResultRow& row : results.rows) {
    CAPTURE(row.method);
    CHECK(row.env_id == 0);
    CHECK(row.sensors_needed == 3);
    CHECK(!row.censored);
    CHECK(row.status == "ok");
    CHECK(row.wall_time_ms == 0.0);
  }
  // Different methods get different seeds, greedy methods share nothing with
  // random.
  std::map<std::string, std::uint64_t> seed_of;
  for (const harness::ResultRow& row : results.rows) seed_of[row.method] = row.seed;
  CHECK(seed_of.size() == 4);
}

TEST_CASE("campaign determinism: repeats and jobs agree, files byte-identical") {
  harness::ExperimentConfig c;
  c.n_envs = 2;
  c.grid = GridSpec{16, 16, 1.0, 1.0};
  c.city.n_rect_range = {3, 5};
  c.city.rect_w_range = {2, 5};
  c.city.rect_h_range = {2, 5};
  c.methods = {"greedy-sweep", "random"};
  c.k = 2;
  c.epsilon = 0.01;
  c.max_sensors = 40;
  c.master_seed = 11;

  const harness::ExperimentResults a = harness::run_experiment(c, 1, false);
  const harness::ExperimentResults b = harness::run_experiment(c, 4, false);
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].method == b.rows[i].method);
    CHECK(a.rows[i].sensors_needed == b.rows[i].sensors_needed);
    CHECK(a.rows[i].censored == b.rows[i].censored);
    CHECK(a.rows[i].seed == b.rows[i].seed);
  }
  REQUIRE(a.curves.size() == b.curves.size());
  for (std::size_t i = 0; i < a.curves.size(); ++i) CHECK(a.curves[i].frac == b.curves[i].frac);

  const fs::path dir = fresh_dir("csv");
  harness::write_results_csv(a, dir / "r1.csv");
  harness::write_results_csv(b, dir / "r2.csv");
  harness::write_curves_csv(a, dir / "c1.csv");
  harness::write_curves_csv(b, dir / "c2.csv");
  CHECK(slurp(dir / "r1.csv") == slurp(dir / "r2.csv"));
  CHECK(slurp(dir / "c1.csv") == slurp(dir / "c2.csv"));

  const std::string header = slurp(dir / "r1.csv").substr(0, slurp(dir / "r1.csv").find('\n'));
  CHECK(header == "env_id,method,seed,threshold,sensors_needed,censored,wall_time_ms,status");
  const std::string curve_header = slurp(dir / "c1.csv").substr(0, slurp(dir / "c1.csv").find('\n'));
  CHECK(curve_header == "env_id,method,step,frac_order_1,frac_order_2");
}

TEST_CASE("campaign curves are non-decreasing in every order") {
  harness::ExperimentConfig c;
  c.n_envs = 2;
  c.grid = GridSpec{16, 16, 1.0, 1.0};
  c.city.n_rect_range = {3, 5};
  c.city.rect_w_range = {2, 5};
  c.city.rect_h_range = {2, 5};
  c.methods = {"greedy-sweep", "random"};
  c.k = 2;
  c.max_sensors = 40;
  c.master_seed = 13;
  const harness::ExperimentResults results = harness::run_experiment(c, 1, false);

  std::map<std::pair<int, std::string>, std::vector<double>> last;
  for (const harness::CurveRow& row : results.curves) {
    REQUIRE(row.frac.size() == 2);
    auto& prev = last[{row.env_id, row.method}];
    if (!prev.empty()) {
      for (std::size_t i = 0; i < 2; ++i) CHECK(row.frac[i] >= prev[i] - 1e-15);
    }
    prev = row.frac;
  }
}

TEST_CASE("campaign censoring is reported, not fatal") {
  harness::ExperimentConfig c = flat_campaign(8, 8);
  c.methods = {"greedy-sweep"};
  c.max_sensors = 2;  // order 3 needs at least 3 sensors
  const harness::ExperimentResults results = harness::run_experiment(c, 1, false);
  REQUIRE(results.rows.size() == 2);
  for (const harness::ResultRow& row : results.rows) {
    CHECK(row.censored);
    CHECK(row.sensors_needed == 3);
    CHECK(row.status == "ok");
  }
}

TEST_CASE("paper-scale smoke: greedy needs no more sensors than random") {
  harness::ExperimentConfig c;
  c.n_envs = 5;
  c.grid = GridSpec{64, 64, 1.0, 1.0};
  c.methods = {"greedy-sweep", "random"};
  c.k = 3;
  c.epsilon = 0.01;
  c.max_sensors = 200;
  c.master_seed = 17;
  const harness::ExperimentResults results = harness::run_experiment(c, 1, false);

  std::map<int, std::map<std::string, int>> at_090;
  for (const harness::ResultRow& row : results.rows) {
    if (row.threshold == 0.9) at_090[row.env_id][row.method] = row.sensors_needed;
  }
  int wins = 0;
  for (const auto& [env_id, by_method] : at_090) {
    if (by_method.at("greedy-sweep") <= by_method.at("random")) ++wins;
  }
  CHECK(wins >= 4);
}

TEST_CASE("dataset export: flat world record count and constant gain plane") {
  const std::vector<Environment> envs{flat_env(6, 6)};
  harness::DatasetExportConfig c;
  c.k = 3;
  c.epsilon = 0.0;
  c.coverage_target = 0.99;
  c.max_sensors = 20;
  c.seed = 3;
  const fs::path dir = fresh_dir("flat_ds");
  const harness::DatasetManifest manifest = harness::export_training_dataset(envs, c, dir);

  REQUIRE(manifest.records.size() == 3);
  CHECK(manifest.k == 3);
  CHECK(manifest.weights == std::vector<double>{1.0, 0.5, 0.25});
  CHECK(fs::exists(dir / "manifest.json"));

  const harness::DatasetRecord rec0 =
      harness::load_dataset_record(dir / manifest.records[0].path, manifest.grid, manifest.k);
  const std::size_t n = 36;
  REQUIRE(rec0.inputs.size() == 4 * n);
  REQUIRE(rec0.labels.size() == 4 * n);
  // Before the first sensor every candidate offers the same gain.
  const float g0 = rec0.labels[0];
  CHECK(g0 > 0.0f);
  for (std::size_t i = 0; i < n; ++i) CHECK(rec0.labels[i] == g0);
  // Flat heights: the h_obs input plane is all zero.
  for (std::size_t i = 0; i < n; ++i) CHECK(rec0.inputs[i] == 0.0f);

  const harness::DatasetManifest reloaded = harness::load_dataset_manifest(dir / "manifest.json");
  CHECK(reloaded.records.size() == manifest.records.size());
  CHECK(reloaded.grid.nx == manifest.grid.nx);
  CHECK(reloaded.weights == manifest.weights);
}

TEST_CASE("dataset export: labels regenerate bit for bit") {
  std::vector<Environment> envs;
  envs.push_back(random_heights_env(91, 12, 12, 1.0, 0.6));
  envs.push_back(random_heights_env(92, 12, 12, 1.0, 0.55));
  harness::DatasetExportConfig c;
  c.k = 2;
  c.epsilon = 0.01;
  c.coverage_target = 0.95;
  c.max_sensors = 30;
  c.seed = 9;
  const fs::path dir = fresh_dir("regen_ds");
  const harness::DatasetManifest manifest = harness::export_training_dataset(envs, c, dir);
  REQUIRE(manifest.records.size() >= 2);

  int env_sensor_total = 0;
  int max_env = 0;
  for (const harness::DatasetRecordInfo& info : manifest.records) {
    ++env_sensor_total;
    max_env = std::max(max_env, info.env_index);
    const harness::DatasetRecord rec =
        harness::load_dataset_record(dir / info.path, manifest.grid, manifest.k);
    const harness::DatasetRecord redo = harness::regenerate_labels(rec, manifest);
    REQUIRE(redo.labels.size() == rec.labels.size());
    CHECK(std::memcmp(redo.labels.data(), rec.labels.data(), rec.labels.size() * sizeof(float)) == 0);
  }
  CHECK(max_env == 1);
  CHECK(env_sensor_total == static_cast<int>(manifest.records.size()));
}

TEST_CASE("dataset export: deterministic bytes") {
  std::vector<Environment> envs{random_heights_env(93, 10, 10, 1.0, 0.6)};
  harness::DatasetExportConfig c;
  c.k = 2;
  c.coverage_target = 0.9;
  c.max_sensors = 20;
  c.seed = 4;
  const fs::path d1 = fresh_dir("det_ds1");
  const fs::path d2 = fresh_dir("det_ds2");
  const harness::DatasetManifest m1 = harness::export_training_dataset(envs, c, d1);
  const harness::DatasetManifest m2 = harness::export_training_dataset(envs, c, d2);
  REQUIRE(m1.records.size() == m2.records.size());
  CHECK(slurp(d1 / "manifest.json") == slurp(d2 / "manifest.json"));
  for (std::size_t r = 0; r < m1.records.size(); ++r)
    CHECK(slurp(d1 / m1.records[r].path) == slurp(d2 / m2.records[r].path));
}

TEST_CASE("dataset export: z_max must be exact in float32") {
  GridSpec spec{4, 4, 1.0, 0.1};
  const Environment env = make_environment(spec, std::vector<double>(16, 0.0));
  harness::DatasetExportConfig c;
  c.k = 1;
  c.seed = 1;
  const fs::path dir = fresh_dir("f32_ds");
  CHECK_THROWS_AS(harness::export_training_dataset({env}, c, dir), InvalidArgument);
}

TEST_CASE("dataset records: truncated file is an I/O error") {
  const fs::path dir = fresh_dir("trunc_ds");
  harness::DatasetRecord rec;
  rec.inputs.assign(3 * 16, 0.5f);
  rec.labels.assign(3 * 16, 0.25f);
  harness::save_dataset_record(rec, dir / "r.bin");
  const std::string bytes = slurp(dir / "r.bin");
  std::ofstream out(dir / "r.bin", std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size() / 2));
  out.close();
  CHECK_THROWS_AS(harness::load_dataset_record(dir / "r.bin", GridSpec{4, 4, 1.0, 1.0}, 2), IoError);
  CHECK_THROWS_AS(harness::load_dataset_record(dir / "missing.bin", GridSpec{4, 4, 1.0, 1.0}, 2), IoError);
}

namespace {

harness::DatasetManifest handmade_manifest(const fs::path& dir, const std::vector<harness::DatasetRecord>& recs,
                                           int nx, int ny, int k) {
  harness::DatasetManifest m;
  m.grid = GridSpec{nx, ny, 1.0, 1.0};
  m.k = k;
  m.weights = std::vector<double>(static_cast<std::size_t>(k), 1.0);
  m.coverage_target = 0.99;
  m.visibility_method = "sweep";
  m.candidate_policy = "streets";
  for (std::size_t r = 0; r < recs.size(); ++r) {
    const std::string name = "rec" + std::to_string(r) + ".bin";
    harness::save_dataset_record(recs[r], dir / name);
    m.records.push_back({name, 0, static_cast<int>(r), 0.0, 0});
  }
  return m;
}

}  // namespace

TEST_CASE("spectrum: centered degenerate cases") {
  const fs::path dir = fresh_dir("spec_ds");
  const int nx = 4, ny = 3, k = 2;
  const std::size_t plane = static_cast<std::size_t>(nx * ny);

  harness::DatasetRecord same;
  same.inputs.assign((1 + k) * plane, 0.75f);
  same.labels.assign((1 + k) * plane, 0.0f);
  {
    const auto m = handmade_manifest(dir, {same, same, same, same}, nx, ny, k);
    const std::vector<double> sv = harness::dataset_spectrum(m, dir);
    REQUIRE(sv.size() == 4);
    for (double s : sv) CHECK(s <= 1e-12);
  }

  harness::DatasetRecord other = same;
  for (std::size_t i = 0; i < plane; ++i) other.inputs[i] = static_cast<float>(i) * 0.125f;
  {
    const fs::path dir2 = fresh_dir("spec_ds2");
    const auto m = handmade_manifest(dir2, {same, other}, nx, ny, k);
    const std::vector<double> sv = harness::dataset_spectrum(m, dir2);
    REQUIRE(sv.size() == 2);
    CHECK(sv[0] > 0.0);
    CHECK(sv[1] <= 1e-9 * sv[0]);
    CHECK(std::is_sorted(sv.rbegin(), sv.rend()));
  }

  const fs::path dir3 = fresh_dir("spec_ds3");
  const auto lonely = handmade_manifest(dir3, {same}, nx, ny, k);
  CHECK_THROWS_AS(harness::dataset_spectrum(lonely, dir3), TooFewRecords);
}

TEST_CASE("spectrum: energy identity on a real export") {
  std::vector<Environment> envs{random_heights_env(94, 10, 10, 1.0, 0.6)};
  harness::DatasetExportConfig c;
  c.k = 2;
  c.coverage_target = 0.97;
  c.max_sensors = 30;
  c.seed = 6;
  const fs::path dir = fresh_dir("energy_ds");
  const harness::DatasetManifest m = harness::export_training_dataset(envs, c, dir);
  REQUIRE(m.records.size() >= 2);

  const std::vector<double> sv = harness::dataset_spectrum(m, dir);
  REQUIRE(sv.size() == m.records.size());
  double energy = 0.0;
  for (double s : sv) energy += s * s;

  // Centered Frobenius norm computed directly from the record rows.
  const std::size_t n = m.records.size();
  std::vector<std::vector<double>> rows;
  for (const harness::DatasetRecordInfo& info : m.records) {
    const harness::DatasetRecord rec = harness::load_dataset_record(dir / info.path, m.grid, m.k);
    rows.emplace_back(rec.inputs.begin(), rec.inputs.end());
  }
  const std::size_t d = rows[0].size();
  std::vector<double> mean(d, 0.0);
  for (const auto& r : rows)
    for (std::size_t i = 0; i < d; ++i) mean[i] += r[i] / static_cast<double>(n);
  double frob2 = 0.0;
  for (const auto& r : rows)
    for (std::size_t i = 0; i < d; ++i) frob2 += (r[i] - mean[i]) * (r[i] - mean[i]);

  CHECK(std::abs(energy - frob2) <= 1e-9 * std::max(1.0, frob2));

  // max_records truncates from the front.
  const std::vector<double> sv2 = harness::dataset_spectrum(m, dir, 2);
  CHECK(sv2.size() == 2);
}

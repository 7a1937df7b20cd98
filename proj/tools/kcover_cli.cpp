// Command-line front end. Exit codes: 0 success, 1 usage/validation error,
// 2 I/O or file-format error.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include <nlohmann/json.hpp>

#include "kcover/dataset.hpp"
#include "kcover/env.hpp"
#include "kcover/errors.hpp"
#include "kcover/greedy.hpp"
#include "kcover/harness.hpp"
#include "kcover/oracle.hpp"
#include "kcover/parallel.hpp"
#include "kcover/run_io.hpp"
#include "kcover/visibility.hpp"

namespace {

using namespace kcover;

struct GenEnvArgs {
  int nx = 64, ny = 64;
  double cell_size = 1.0, z_max = 1.0;
  std::pair<int, int> n_rect{8, 16}, rect_w{3, 10}, rect_h{3, 10};
  std::pair<double, double> height{0.2, 0.9};
  std::uint64_t seed = 0;
  std::string out;
  std::string from_pgm;
};

struct RunArgs {
  std::string env_path, out, config_path;
  std::string method = "greedy";
  int k = 3;
  std::vector<double> weights;
  double epsilon = 0.01, tau = 0.9;
  int max_sensors = 200;
  std::string visibility = "sweep", candidates = "streets", termination = "order-k";
  bool stop_on_zero_gain = false, top_up = false;
  std::uint64_t seed = 0;

  CLI::Option *k_opt = nullptr, *weights_opt = nullptr, *epsilon_opt = nullptr, *tau_opt = nullptr,
              *max_sensors_opt = nullptr, *visibility_opt = nullptr, *candidates_opt = nullptr,
              *termination_opt = nullptr, *stop_opt = nullptr, *seed_opt = nullptr;
};

struct GainFieldArgs {
  std::string env_path, out, run_path;
  int k = 3, prefix = -1;
  std::string visibility = "sweep", candidates = "streets";
  int jobs = 0;

  CLI::Option *k_opt = nullptr, *prefix_opt = nullptr, *visibility_opt = nullptr, *candidates_opt = nullptr;
};

struct VerifyArgs {
  std::string env_path, out;
  int k = 2, l_max = 2, max_sensors = 5;
  double epsilon = 0.0, tau = 0.999999;
  std::string candidates = "streets";
  std::uint64_t seed = 0, enumeration_cap = 2'000'000;
};

struct BenchArgs {
  std::string config_path, out_results, out_curves;
  int n_envs = 20;
  std::uint64_t master_seed = 1;
  int jobs = 0;
  bool no_timing = false;

  CLI::Option *n_envs_opt = nullptr, *seed_opt = nullptr;
};

struct ExportArgs {
  std::vector<std::string> env_paths;
  std::string out_dir;
  int k = 3, max_sensors = 200;
  double epsilon = 0.01, coverage_target = 0.99;
  std::string visibility = "sweep", candidates = "streets";
  std::uint64_t seed = 0;
};

struct SpectrumArgs {
  std::string manifest_path, out;
  int max_records = 1 << 30;
};

void do_gen_env(const GenEnvArgs& a) {
  if (!a.from_pgm.empty()) {
    save_environment(import_pgm(a.from_pgm, a.cell_size, a.z_max), a.out);
    return;
  }
  const GridSpec spec{a.nx, a.ny, a.cell_size, a.z_max};
  CityGenParams params;
  params.n_rect_range = a.n_rect;
  params.rect_w_range = a.rect_w;
  params.rect_h_range = a.rect_h;
  params.height_range = a.height;
  save_environment(generate_random_city(spec, params, a.seed), a.out);
}

GreedyConfig run_args_to_config(const RunArgs& a) {
  GreedyConfig config;
  if (!a.config_path.empty()) config = load_greedy_config_json(a.config_path);
  if (a.k_opt->count()) {
    config.k = a.k;
    if (!a.weights_opt->count() && config.weights.k() != a.k) config.weights = Weights::halving(a.k);
  }
  if (a.weights_opt->count()) config.weights = Weights(a.weights, true);
  if (a.epsilon_opt->count()) config.epsilon = a.epsilon;
  if (a.tau_opt->count()) config.tau = a.tau;
  if (a.max_sensors_opt->count()) config.max_sensors = a.max_sensors;
  if (a.visibility_opt->count()) config.visibility_method = parse_visibility_method(a.visibility);
  if (a.candidates_opt->count()) config.candidate_policy = parse_candidate_policy(a.candidates);
  if (a.termination_opt->count()) config.termination = parse_termination(a.termination);
  if (a.stop_opt->count()) config.stop_on_zero_gain = a.stop_on_zero_gain;
  if (a.seed_opt->count()) config.seed = a.seed;
  return config;
}

void do_run(const RunArgs& a) {
  const Environment env = load_environment(a.env_path);
  const GreedyConfig config = run_args_to_config(a);
  PlacementRun run;
  if (a.method == "greedy") {
    run = greedy_place(env, config);
  } else if (a.method == "parallel") {
    ParallelConfig pc;
    pc.k = config.k;
    pc.epsilon = config.epsilon;
    pc.tau = config.tau;
    pc.max_sensors_per_run = std::max(1, config.max_sensors / config.k);
    pc.visibility_method = config.visibility_method;
    pc.candidate_policy = config.candidate_policy;
    pc.top_up = a.top_up;
    pc.seed = config.seed;
    run = parallel_greedy_place(env, pc);
  } else {
    run = harness::random_baseline(env, config);
  }
  save_run_json(run, a.out);
  std::cout << run.sensors.size() << " sensors, terminated by " << to_string(run.terminated_by) << "\n";
}

void do_gain_field(const GainFieldArgs& a) {
  const Environment env = load_environment(a.env_path);
  GreedyConfig config;
  std::vector<SensorPose> sensors;
  if (!a.run_path.empty()) {
    PlacementRun run = load_run_json(a.run_path);
    config = run.config;
    sensors = std::move(run.sensors);
  }
  if (a.k_opt->count()) {
    config.k = a.k;
    config.weights = Weights::halving(a.k);
  }
  if (a.visibility_opt->count()) config.visibility_method = parse_visibility_method(a.visibility);
  if (a.candidates_opt->count()) config.candidate_policy = parse_candidate_policy(a.candidates);

  int prefix = a.prefix_opt->count() ? a.prefix : static_cast<int>(sensors.size());
  if (prefix < 0 || prefix > static_cast<int>(sensors.size()))
    throw InvalidArgument("gain-field: --prefix must be in [0, " + std::to_string(sensors.size()) + "]");

  PsiStack stack(env.nx(), env.ny(), config.k, env.z_max());
  for (int s = 0; s < prefix; ++s) stack.insert_field(occlusion_field(env, sensors[s], config.visibility_method));
  const CellMask candidates = candidate_mask(env, config.candidate_policy);
  const GainField field = gain_field(env, stack, config.weights, candidates, config.visibility_method, a.jobs);
  save_gain_field_json(field, a.out);
  std::cout << "max gain " << field.max_gain << " at (" << field.argmax_cell.i << ", " << field.argmax_cell.j
            << ")\n";
}

int do_verify(const VerifyArgs& a) {
  const Environment env = load_environment(a.env_path);
  GreedyConfig config;
  config.k = a.k;
  config.weights = Weights::halving(a.k);
  config.epsilon = a.epsilon;
  config.tau = a.tau;
  config.max_sensors = a.max_sensors;
  config.candidate_policy = parse_candidate_policy(a.candidates);
  config.seed = a.seed;
  const oracle::TheoremReport report = oracle::verify_theorem_bound(env, config, a.l_max, nullptr, a.enumeration_cap);
  if (!a.out.empty()) save_theorem_report_json(report, a.out);
  std::cout << report.checks.size() << " checks, all_pass: " << (report.all_pass ? "true" : "false") << "\n";
  return report.all_pass ? 0 : 1;
}

void do_bench(const BenchArgs& a) {
  harness::ExperimentConfig config;
  if (!a.config_path.empty()) config = load_experiment_config_json(a.config_path);
  if (a.n_envs_opt->count()) config.n_envs = a.n_envs;
  if (a.seed_opt->count()) config.master_seed = a.master_seed;
  const harness::ExperimentResults results = harness::run_experiment(config, a.jobs, !a.no_timing);
  harness::write_results_csv(results, a.out_results);
  harness::write_curves_csv(results, a.out_curves);
  std::cout << results.rows.size() << " result rows, " << results.curves.size() << " curve rows\n";
}

void do_export_dataset(const ExportArgs& a) {
  std::vector<Environment> envs;
  envs.reserve(a.env_paths.size());
  for (const std::string& p : a.env_paths) envs.push_back(load_environment(p));
  harness::DatasetExportConfig config;
  config.k = a.k;
  config.epsilon = a.epsilon;
  config.coverage_target = a.coverage_target;
  config.max_sensors = a.max_sensors;
  config.visibility_method = parse_visibility_method(a.visibility);
  config.candidate_policy = parse_candidate_policy(a.candidates);
  config.seed = a.seed;
  const harness::DatasetManifest manifest = harness::export_training_dataset(envs, config, a.out_dir);
  std::cout << manifest.records.size() << " records\n";
}

void do_spectrum(const SpectrumArgs& a) {
  const std::vector<double> sv = harness::dataset_spectrum(a.manifest_path, a.max_records);
  double energy = 0.0;
  for (double s : sv) energy += s * s;
  nlohmann::json j{{"singular_values", sv}, {"energy", energy}};
  std::ofstream out(a.out);
  if (!out) throw IoError("spectrum: cannot open " + a.out);
  out << j.dump(2) << '\n';
  std::cout << sv.size() << " singular values, energy " << energy << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Grid k-coverage sensor placement"};
  app.require_subcommand(1);

  GenEnvArgs gen;
  CLI::App* cmd_gen = app.add_subcommand("gen-env", "Generate a synthetic city environment (or import a PGM)");
  cmd_gen->add_option("--nx", gen.nx, "Grid columns")->check(CLI::PositiveNumber);
  cmd_gen->add_option("--ny", gen.ny, "Grid rows")->check(CLI::PositiveNumber);
  cmd_gen->add_option("--cell-size", gen.cell_size, "Cell edge length")->check(CLI::PositiveNumber);
  cmd_gen->add_option("--z-max", gen.z_max, "Ceiling height")->check(CLI::PositiveNumber);
  cmd_gen->add_option("--n-rect", gen.n_rect, "Rectangle count range (inclusive)");
  cmd_gen->add_option("--rect-w", gen.rect_w, "Rectangle width range in cells");
  cmd_gen->add_option("--rect-h", gen.rect_h, "Rectangle height range in cells");
  cmd_gen->add_option("--height", gen.height, "Building height range [lo, hi)");
  cmd_gen->add_option("--seed", gen.seed, "Generator seed");
  cmd_gen->add_option("--from-pgm", gen.from_pgm, "Import heights from a PGM image instead of generating");
  cmd_gen->add_option("--out", gen.out, "Output environment file")->required();

  RunArgs run;
  CLI::App* cmd_run = app.add_subcommand("run", "Place sensors on an environment");
  cmd_run->add_option("--env", run.env_path, "Environment file")->required();
  cmd_run->add_option("--config", run.config_path, "JSON config file; explicit flags override its values");
  cmd_run->add_option("--method", run.method, "Placement method")
      ->check(CLI::IsMember({"greedy", "parallel", "random"}));
  run.k_opt = cmd_run->add_option("--k", run.k, "Coverage order");
  run.weights_opt = cmd_run->add_option("--weights", run.weights, "Per-order weights w_1..w_k");
  run.epsilon_opt = cmd_run->add_option("--epsilon", run.epsilon, "Relative gain band width");
  run.tau_opt = cmd_run->add_option("--tau", run.tau, "Coverage fraction target");
  run.max_sensors_opt = cmd_run->add_option("--max-sensors", run.max_sensors, "Sensor cap (total across runs)");
  run.visibility_opt =
      cmd_run->add_option("--visibility", run.visibility, "Occlusion field method")->check(CLI::IsMember({"exact", "sweep"}));
  run.candidates_opt = cmd_run->add_option("--candidates", run.candidates, "Candidate cells")
                           ->check(CLI::IsMember({"streets", "all-free-cells"}));
  run.termination_opt = cmd_run->add_option("--termination", run.termination, "Coverage criterion")
                            ->check(CLI::IsMember({"order-k", "mean-order"}));
  run.stop_opt = cmd_run->add_flag("--stop-on-zero-gain", run.stop_on_zero_gain, "Stop when the best gain is zero");
  cmd_run->add_flag("--top-up", run.top_up, "parallel only: continue on the merged stack if capped short of tau");
  run.seed_opt = cmd_run->add_option("--seed", run.seed, "Run seed");
  cmd_run->add_option("--out", run.out, "Output run JSON")->required();

  GainFieldArgs gf;
  CLI::App* cmd_gf = app.add_subcommand("gain-field", "Evaluate every candidate's gain for a placement prefix");
  cmd_gf->add_option("--env", gf.env_path, "Environment file")->required();
  cmd_gf->add_option("--run", gf.run_path, "Run JSON supplying the placed sensors and config");
  gf.prefix_opt = cmd_gf->add_option("--prefix", gf.prefix, "Use only the first N sensors of the run");
  gf.k_opt = cmd_gf->add_option("--k", gf.k, "Coverage order (halving weights)");
  gf.visibility_opt =
      cmd_gf->add_option("--visibility", gf.visibility, "Occlusion field method")->check(CLI::IsMember({"exact", "sweep"}));
  gf.candidates_opt = cmd_gf->add_option("--candidates", gf.candidates, "Candidate cells")
                          ->check(CLI::IsMember({"streets", "all-free-cells"}));
  cmd_gf->add_option("--jobs", gf.jobs, "Worker threads (0 = all cores)");
  cmd_gf->add_option("--out", gf.out, "Output JSON with G and V planes")->required();

  VerifyArgs ver;
  CLI::App* cmd_ver = app.add_subcommand("verify", "Check the greedy value bound against exhaustive optima");
  cmd_ver->add_option("--env", ver.env_path, "Environment file (keep it small)")->required();
  cmd_ver->add_option("--k", ver.k, "Coverage order");
  cmd_ver->add_option("--epsilon", ver.epsilon, "Relative gain band width");
  cmd_ver->add_option("--tau", ver.tau, "Coverage fraction target");
  cmd_ver->add_option("--max-sensors", ver.max_sensors, "Greedy sensor cap (prefix length checked)");
  cmd_ver->add_option("--l-max", ver.l_max, "Largest optimal-set size to enumerate");
  cmd_ver->add_option("--candidates", ver.candidates, "Candidate cells")
      ->check(CLI::IsMember({"streets", "all-free-cells"}));
  cmd_ver->add_option("--seed", ver.seed, "Greedy run seed");
  cmd_ver->add_option("--enumeration-cap", ver.enumeration_cap, "Abort if the multiset count exceeds this");
  cmd_ver->add_option("--out", ver.out, "Optional report JSON");

  BenchArgs bench;
  CLI::App* cmd_bench = app.add_subcommand("bench", "Run a multi-environment placement campaign");
  cmd_bench->add_option("--config", bench.config_path, "ExperimentConfig JSON; absent keys keep defaults");
  bench.n_envs_opt = cmd_bench->add_option("--n-envs", bench.n_envs, "Number of environments");
  bench.seed_opt = cmd_bench->add_option("--master-seed", bench.master_seed, "Campaign master seed");
  cmd_bench->add_option("--jobs", bench.jobs, "Concurrent campaign cells (0 = all cores)");
  cmd_bench->add_flag("--no-timing", bench.no_timing, "Zero the wall_time_ms column for byte-stable output");
  cmd_bench->add_option("--out-results", bench.out_results, "Results CSV path")->required();
  cmd_bench->add_option("--out-curves", bench.out_curves, "Coverage curves CSV path")->required();

  ExportArgs exp;
  CLI::App* cmd_exp = app.add_subcommand("export-dataset", "Export greedy states and gain labels as float32 planes");
  cmd_exp->add_option("--env", exp.env_paths, "Environment file(s)")->required()->expected(-1);
  cmd_exp->add_option("--k", exp.k, "Coverage order (halving weights)");
  cmd_exp->add_option("--epsilon", exp.epsilon, "Relative gain band width");
  cmd_exp->add_option("--coverage-target", exp.coverage_target, "Stop exporting past this order-k fraction");
  cmd_exp->add_option("--max-sensors", exp.max_sensors, "Per-environment sensor cap");
  cmd_exp->add_option("--visibility", exp.visibility, "Occlusion field method")
      ->check(CLI::IsMember({"exact", "sweep"}));
  cmd_exp->add_option("--candidates", exp.candidates, "Candidate cells")
      ->check(CLI::IsMember({"streets", "all-free-cells"}));
  cmd_exp->add_option("--seed", exp.seed, "Export seed");
  cmd_exp->add_option("--out-dir", exp.out_dir, "Output directory for records + manifest.json")->required();

  SpectrumArgs spec;
  CLI::App* cmd_spec = app.add_subcommand("spectrum", "Singular values of an exported dataset's input matrix");
  cmd_spec->add_option("--manifest", spec.manifest_path, "Dataset manifest.json")->required();
  cmd_spec->add_option("--max-records", spec.max_records, "Use at most this many records");
  cmd_spec->add_option("--out", spec.out, "Output JSON")->required();

  try {
    app.parse(argc, argv);
    if (cmd_gen->parsed()) do_gen_env(gen);
    if (cmd_run->parsed()) do_run(run);
    if (cmd_gf->parsed()) do_gain_field(gf);
    if (cmd_ver->parsed()) return do_verify(ver);
    if (cmd_bench->parsed()) do_bench(bench);
    if (cmd_exp->parsed()) do_export_dataset(exp);
    if (cmd_spec->parsed()) do_spectrum(spec);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

#include "kcover/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>

#include "kcover/detail/parallel_for.hpp"
#include "kcover/parallel.hpp"

namespace kcover::harness {

PlacementRun random_baseline(const Environment& env, const GreedyConfig& config,
                             const CellMask* candidates_override) {
  config.validate();
  if (env.free_volume() == 0.0) throw DegenerateFreeSpace("random_baseline: environment has no free space");
  const CellMask candidates =
      candidates_override ? *candidates_override : candidate_mask(env, config.candidate_policy);
  std::vector<Cell> cells;
  for (int j = 0; j < env.ny(); ++j)
    for (int i = 0; i < env.nx(); ++i)
      if (candidates.at(i, j)) cells.push_back({i, j});
  if (cells.empty()) throw EmptyCandidateSet("random_baseline: no candidate cells");

  PlacementRun run;
  run.method = "random";
  run.config = config;
  PsiStack stack(env.nx(), env.ny(), config.k, env.z_max());
  Rng rng(config.seed);
  while (true) {
    const Cell cell = cells[uniform_index(rng, cells.size())];
    const SensorPose pose{cell, env.height(cell.i, cell.j)};
    const OcclusionField field = occlusion_field(env, pose, config.visibility_method);
    TraceStep step;
    step.selected = cell;
    step.gain = gain(stack, env, config.weights, field).G;
    step.band_size = cells.size();
    stack.insert_field(field);
    step.frac = detail::fraction_per_order(stack, env);
    run.sensors.push_back(pose);
    run.trace.push_back(std::move(step));
    if (detail::reached_target(stack, env, config)) {
      run.terminated_by = TerminatedBy::threshold;
      break;
    }
    if (static_cast<int>(run.sensors.size()) >= config.max_sensors) {
      run.terminated_by = TerminatedBy::cap;
      break;
    }
  }
  return run;
}

void ExperimentConfig::validate() const {
  if (n_envs < 1) throw InvalidArgument("experiment: n_envs must be >= 1");
  grid.validate();
  city.validate(grid);
  if (methods.empty()) throw InvalidArgument("experiment: no methods");
  for (const std::string& m : methods)
    if (m != "greedy-exact" && m != "greedy-sweep" && m != "parallel" && m != "random")
      throw InvalidArgument("experiment: unknown method '" + m + "'");
  if (thresholds.empty()) throw InvalidArgument("experiment: no thresholds");
  for (double t : thresholds)
    if (!(t > 0.0) || !(t < 1.0)) throw InvalidArgument("experiment: thresholds must be in (0, 1)");
  if (k < 1) throw InvalidArgument("experiment: k must be >= 1");
  if (!(epsilon >= 0.0) || !(epsilon < 1.0)) throw InvalidArgument("experiment: epsilon must be in [0, 1)");
  if (max_sensors < 1) throw InvalidArgument("experiment: max_sensors must be >= 1");
}

PlacementRun run_method(const Environment& env, const std::string& method, const ExperimentConfig& config,
                        std::uint64_t seed) {
  const double tau = *std::max_element(config.thresholds.begin(), config.thresholds.end());
  if (method == "parallel") {
    ParallelConfig pc;
    pc.k = config.k;
    pc.epsilon = config.epsilon;
    pc.tau = tau;
    pc.max_sensors_per_run = std::max(1, config.max_sensors / config.k);
    pc.seed = seed;
    return parallel_greedy_place(env, pc);
  }
  GreedyConfig gc;
  gc.k = config.k;
  gc.weights = Weights::halving(config.k);
  gc.epsilon = config.epsilon;
  gc.tau = tau;
  gc.max_sensors = config.max_sensors;
  gc.seed = seed;
  if (method == "greedy-exact") gc.visibility_method = VisibilityMethod::exact;
  if (method == "random") return random_baseline(env, gc);
  if (method != "greedy-exact" && method != "greedy-sweep")
    throw InvalidArgument("run_method: unknown method '" + method + "'");
  return greedy_place(env, gc);
}

int sensors_to_threshold(const PlacementRun& run, double threshold, int max_sensors, bool* censored) {
  for (std::size_t s = 0; s < run.trace.size(); ++s) {
    if (run.trace[s].frac.back() >= threshold) {
      if (censored) *censored = false;
      return static_cast<int>(s) + 1;
    }
  }
  if (censored) *censored = true;
  return max_sensors + 1;
}

ExperimentResults run_experiment(const ExperimentConfig& config, int jobs, bool with_timing) {
  config.validate();
  ExperimentResults results;
  results.k = config.k;

  std::vector<Environment> envs;
  envs.reserve(static_cast<std::size_t>(config.n_envs));
  for (int e = 0; e < config.n_envs; ++e)
    envs.push_back(generate_random_city(config.grid, config.city, mix_seed(config.master_seed, e)));

  struct Cell9 {
    std::vector<ResultRow> rows;
    std::vector<CurveRow> curves;
  };
  const std::size_t n_methods = config.methods.size();
  std::vector<Cell9> cells(envs.size() * n_methods);

  detail::parallel_for(cells.size(), jobs, [&](std::size_t begin, std::size_t end, int) {
    for (std::size_t idx = begin; idx < end; ++idx) {
      const int env_id = static_cast<int>(idx / n_methods);
      const std::string& method = config.methods[idx % n_methods];
      const std::uint64_t seed = mix_seed(config.master_seed, static_cast<std::uint64_t>(env_id), fnv1a(method));
      Cell9& out = cells[idx];
      std::string status = "ok";
      PlacementRun run;
      const auto t0 = std::chrono::steady_clock::now();
      try {
        run = run_method(envs[static_cast<std::size_t>(env_id)], method, config, seed);
      } catch (const std::exception& e) {
        status = e.what();
        std::replace(status.begin(), status.end(), ',', ';');
        std::replace(status.begin(), status.end(), '\n', ' ');
      }
      const auto t1 = std::chrono::steady_clock::now();
      const double ms = with_timing ? std::chrono::duration<double, std::milli>(t1 - t0).count() : 0.0;
      for (double threshold : config.thresholds) {
        ResultRow row;
        row.env_id = env_id;
        row.method = method;
        row.seed = seed;
        row.threshold = threshold;
        row.wall_time_ms = ms;
        row.status = status;
        if (status == "ok") {
          row.sensors_needed = sensors_to_threshold(run, threshold, config.max_sensors, &row.censored);
        } else {
          row.sensors_needed = -1;
          row.censored = false;
        }
        out.rows.push_back(std::move(row));
      }
      if (status == "ok") {
        for (std::size_t s = 0; s < run.trace.size(); ++s)
          out.curves.push_back({env_id, method, static_cast<int>(s) + 1, run.trace[s].frac});
      }
    }
  });

  for (Cell9& cell : cells) {
    for (ResultRow& r : cell.rows) results.rows.push_back(std::move(r));
    for (CurveRow& c : cell.curves) results.curves.push_back(std::move(c));
  }
  return results;
}

namespace {

std::string fmt_double(double v, const char* spec = "%.17g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

}  // namespace

void write_results_csv(const ExperimentResults& results, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("write_results_csv: cannot open " + path.string());
  out << "env_id,method,seed,threshold,sensors_needed,censored,wall_time_ms,status\n";
  for (const ResultRow& r : results.rows) {
    out << r.env_id << ',' << r.method << ',' << r.seed << ',' << fmt_double(r.threshold, "%g") << ','
        << r.sensors_needed << ',' << (r.censored ? 1 : 0) << ',' << fmt_double(r.wall_time_ms, "%.3f") << ','
        << r.status << '\n';
  }
  if (!out) throw IoError("write_results_csv: write failed for " + path.string());
}

void write_curves_csv(const ExperimentResults& results, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("write_curves_csv: cannot open " + path.string());
  out << "env_id,method,step";
  for (int i = 1; i <= results.k; ++i) out << ",frac_order_" << i;
  out << '\n';
  for (const CurveRow& c : results.curves) {
    out << c.env_id << ',' << c.method << ',' << c.step;
    for (double f : c.frac) out << ',' << fmt_double(f);
    out << '\n';
  }
  if (!out) throw IoError("write_curves_csv: write failed for " + path.string());
}

}  // namespace kcover::harness

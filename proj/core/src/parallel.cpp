#include "kcover/parallel.hpp"

#include <algorithm>

namespace kcover {

void ParallelConfig::validate() const {
  if (k < 1) throw InvalidArgument("config: k must be >= 1");
  if (!(epsilon >= 0.0) || !(epsilon < 1.0)) throw InvalidArgument("config: epsilon must be in [0, 1)");
  if (!(tau > 0.0) || !(tau < 1.0)) throw InvalidArgument("config: tau must be in (0, 1)");
  if (max_sensors_per_run < 1) throw InvalidArgument("config: max_sensors_per_run must be >= 1");
}

namespace {

GreedyConfig sub_run_config(const ParallelConfig& config, int run_index) {
  GreedyConfig sub;
  sub.k = 1;
  sub.weights = Weights({1.0});
  sub.epsilon = config.epsilon;
  sub.tau = config.tau_per_run();
  sub.max_sensors = config.max_sensors_per_run;
  sub.stop_on_zero_gain = false;
  sub.visibility_method = config.visibility_method;
  sub.candidate_policy = config.candidate_policy;
  sub.seed = mix_seed(config.seed, static_cast<std::uint64_t>(run_index) + 1);
  return sub;
}

PlacementRun single_coverage_run(const Environment& env, const ParallelConfig& config, const CellMask& candidates,
                                 const std::vector<Cell>& candidate_cells, int run_index, int jobs) {
  PlacementRun run;
  run.method = "greedy";
  run.config = sub_run_config(config, run_index);
  Rng rng(run.config.seed);

  // first sensor: uniform over candidates, recorded with its realized gain
  PsiStack stack(env.nx(), env.ny(), 1, env.z_max());
  const Cell first = candidate_cells[uniform_index(rng, candidate_cells.size())];
  const SensorPose pose{first, env.height(first.i, first.j)};
  const OcclusionField field = occlusion_field(env, pose, config.visibility_method);
  TraceStep step;
  step.selected = first;
  step.gain = gain(stack, env, run.config.weights, field).G;
  step.band_size = candidate_cells.size();
  stack.insert_field(field);
  step.frac = detail::fraction_per_order(stack, env);
  run.sensors.push_back(pose);
  run.trace.push_back(std::move(step));

  if (detail::reached_target(stack, env, run.config)) {
    run.terminated_by = TerminatedBy::threshold;
  } else if (static_cast<int>(run.sensors.size()) >= run.config.max_sensors) {
    run.terminated_by = TerminatedBy::cap;
  } else {
    run.terminated_by = detail::greedy_steps(env, run.config, candidates, rng, stack, run.sensors, run.trace, jobs);
  }
  return run;
}

}  // namespace

std::pair<std::vector<SensorPose>, PsiStack> merge_runs(const Environment& env,
                                                        const std::vector<std::vector<SensorPose>>& runs, int k,
                                                        VisibilityMethod method) {
  std::vector<SensorPose> merged;
  std::size_t longest = 0;
  for (const auto& r : runs) longest = std::max(longest, r.size());
  for (std::size_t s = 0; s < longest; ++s)
    for (const auto& r : runs)
      if (s < r.size()) merged.push_back(r[s]);

  PsiStack stack(env.nx(), env.ny(), k, env.z_max());
  for (const SensorPose& pose : merged) stack.insert_field(occlusion_field(env, pose, method));
  return {std::move(merged), std::move(stack)};
}

PlacementRun parallel_greedy_place(const Environment& env, const ParallelConfig& config,
                                   const CellMask* candidates_override, int jobs) {
  config.validate();
  if (env.free_volume() == 0.0) throw DegenerateFreeSpace("parallel_greedy_place: environment has no free space");
  const CellMask candidates =
      candidates_override ? *candidates_override : candidate_mask(env, config.candidate_policy);
  std::vector<Cell> candidate_cells;
  for (int j = 0; j < env.ny(); ++j)
    for (int i = 0; i < env.nx(); ++i)
      if (candidates.at(i, j)) candidate_cells.push_back({i, j});
  if (candidate_cells.empty()) throw EmptyCandidateSet("parallel_greedy_place: no candidate cells");

  PlacementRun run;
  run.method = "parallel";
  run.config.k = config.k;
  run.config.weights = Weights::halving(config.k);
  run.config.epsilon = config.epsilon;
  run.config.tau = config.tau;
  run.config.max_sensors = config.max_sensors_per_run * config.k;
  run.config.visibility_method = config.visibility_method;
  run.config.candidate_policy = config.candidate_policy;
  run.config.seed = config.seed;

  bool any_capped = false;
  for (int l = 0; l < config.k; ++l) {
    run.sub_runs.push_back(single_coverage_run(env, config, candidates, candidate_cells, l, jobs));
    any_capped = any_capped || run.sub_runs.back().terminated_by == TerminatedBy::cap;
  }

  // round-robin merge, re-measuring coverage on the shared order-k stack
  PsiStack stack(env.nx(), env.ny(), config.k, env.z_max());
  std::size_t longest = 0;
  for (const auto& sub : run.sub_runs) longest = std::max(longest, sub.sensors.size());
  for (std::size_t s = 0; s < longest; ++s) {
    for (const auto& sub : run.sub_runs) {
      if (s >= sub.sensors.size()) continue;
      const SensorPose pose = sub.sensors[s];
      stack.insert_field(occlusion_field(env, pose, config.visibility_method));
      TraceStep step;
      step.selected = pose.cell;
      step.gain = sub.trace[s].gain;
      step.band_size = sub.trace[s].band_size;
      step.frac = detail::fraction_per_order(stack, env);
      run.sensors.push_back(pose);
      run.trace.push_back(std::move(step));
    }
  }

  bool reached = detail::reached_target(stack, env, run.config);
  if (!reached && config.top_up) {
    Rng rng(mix_seed(config.seed, 0));
    const TerminatedBy tb =
        detail::greedy_steps(env, run.config, candidates, rng, stack, run.sensors, run.trace, jobs);
    reached = tb == TerminatedBy::threshold;
  }
  run.terminated_by = !reached && any_capped ? TerminatedBy::cap : TerminatedBy::threshold;
  return run;
}

}  // namespace kcover

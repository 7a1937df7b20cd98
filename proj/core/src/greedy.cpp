#include "kcover/greedy.hpp"

#include <algorithm>
#include <cmath>

namespace kcover {

std::string to_string(CandidatePolicy p) { return p == CandidatePolicy::streets ? "streets" : "all-free-cells"; }
std::string to_string(Termination t) { return t == Termination::order_k ? "order-k" : "mean-order"; }

std::string to_string(TerminatedBy t) {
  switch (t) {
    case TerminatedBy::threshold: return "threshold";
    case TerminatedBy::cap: return "cap";
    case TerminatedBy::zero_gain: return "zero-gain";
    default: return "exhausted";
  }
}

CandidatePolicy parse_candidate_policy(const std::string& s) {
  if (s == "streets") return CandidatePolicy::streets;
  if (s == "all-free-cells") return CandidatePolicy::all_free_cells;
  throw InvalidArgument("unknown candidate policy '" + s + "' (expected streets|all-free-cells)");
}

Termination parse_termination(const std::string& s) {
  if (s == "order-k") return Termination::order_k;
  if (s == "mean-order") return Termination::mean_order;
  throw InvalidArgument("unknown termination criterion '" + s + "' (expected order-k|mean-order)");
}

TerminatedBy parse_terminated_by(const std::string& s) {
  if (s == "threshold") return TerminatedBy::threshold;
  if (s == "cap") return TerminatedBy::cap;
  if (s == "zero-gain") return TerminatedBy::zero_gain;
  if (s == "exhausted") return TerminatedBy::exhausted;
  throw InvalidArgument("unknown termination reason '" + s + "'");
}

void GreedyConfig::validate() const {
  if (k < 1) throw InvalidArgument("config: k must be >= 1");
  if (weights.k() != k) throw WeightCountMismatch("config: " + std::to_string(weights.k()) + " weights for k = " +
                                                  std::to_string(k));
  if (!(epsilon >= 0.0) || !(epsilon < 1.0)) throw InvalidArgument("config: epsilon must be in [0, 1)");
  if (!(tau > 0.0) || !(tau < 1.0)) throw InvalidArgument("config: tau must be in (0, 1)");
  if (max_sensors < 1) throw InvalidArgument("config: max_sensors must be >= 1");
}

double coverage_fraction(const PsiStack& stack, const Environment& env, int order) {
  if (order < 1 || order > stack.k())
    throw OrderExceedsCount("coverage_fraction: order " + std::to_string(order) + " with k = " +
                            std::to_string(stack.k()));
  if (env.free_volume() == 0.0) throw DegenerateFreeSpace("coverage_fraction: environment has no free space");
  return coverage_volumes(stack, env)[order - 1] / env.free_volume();
}

Cell select_epsilon_band(const GainField& field, double epsilon, Rng& rng, std::size_t* band_size_out) {
  std::vector<Cell> band;
  const bool take_all = field.max_gain <= kZeroGainTolerance;
  const double threshold = (1.0 - epsilon) * field.max_gain;
  for (int j = 0; j < field.ny; ++j) {
    for (int i = 0; i < field.nx; ++i) {
      if (!field.candidates.at(i, j)) continue;
      if (take_all || field.G[static_cast<std::size_t>(j) * field.nx + i] >= threshold) band.push_back({i, j});
    }
  }
  if (band.empty()) throw EmptyCandidateSet("select_epsilon_band: no candidates");
  const std::size_t pick = uniform_index(rng, band.size());
  if (band_size_out) *band_size_out = band.size();
  return band[pick];
}

CellMask candidate_mask(const Environment& env, CandidatePolicy policy) {
  if (policy == CandidatePolicy::streets) return street_mask(env);
  CellMask mask(env.nx(), env.ny(), false);
  for (std::size_t c = 0; c < env.heights().size(); ++c) mask.v[c] = env.heights()[c] < env.z_max() ? 1 : 0;
  return mask;
}

namespace detail {

std::vector<double> fraction_per_order(const PsiStack& stack, const Environment& env) {
  const std::vector<double> vol = coverage_volumes(stack, env);
  std::vector<double> frac(vol.size());
  for (std::size_t i = 0; i < vol.size(); ++i) frac[i] = vol[i] / env.free_volume();
  return frac;
}

bool reached_target(const PsiStack& stack, const Environment& env, const GreedyConfig& config) {
  const std::vector<double> vol = coverage_volumes(stack, env);
  if (config.termination == Termination::order_k) return vol.back() >= config.tau * env.free_volume();
  double sum = 0.0;
  for (double v : vol) sum += v;
  return sum >= config.tau * config.k * env.free_volume();
}

TerminatedBy greedy_steps(const Environment& env, const GreedyConfig& config, const CellMask& candidates, Rng& rng,
                          PsiStack& stack, std::vector<SensorPose>& sensors, std::vector<TraceStep>& trace,
                          int jobs) {
  if (static_cast<int>(sensors.size()) >= config.max_sensors) return TerminatedBy::cap;
  while (true) {
    const GainField gf = gain_field(env, stack, config.weights, candidates, config.visibility_method, jobs);
    if (config.stop_on_zero_gain && gf.max_gain <= kZeroGainTolerance) return TerminatedBy::zero_gain;

    TraceStep step;
    const Cell cell = select_epsilon_band(gf, config.epsilon, rng, &step.band_size);
    const SensorPose pose{cell, env.height(cell.i, cell.j)};
    stack.insert_field(occlusion_field(env, pose, config.visibility_method));
    sensors.push_back(pose);
    step.selected = cell;
    step.gain = gf.G[env.spec().index(cell.i, cell.j)];
    step.frac = fraction_per_order(stack, env);
    trace.push_back(std::move(step));

    if (reached_target(stack, env, config)) return TerminatedBy::threshold;
    if (static_cast<int>(sensors.size()) >= config.max_sensors) return TerminatedBy::cap;
  }
}

}  // namespace detail

PlacementRun greedy_place(const Environment& env, const GreedyConfig& config, const CellMask* candidates_override,
                          int jobs) {
  config.validate();
  if (env.free_volume() == 0.0) throw DegenerateFreeSpace("greedy_place: environment has no free space");
  const CellMask candidates = candidates_override ? *candidates_override : candidate_mask(env, config.candidate_policy);
  if (candidates.count() == 0) throw EmptyCandidateSet("greedy_place: no candidate cells");

  PlacementRun run;
  run.method = "greedy";
  run.config = config;
  PsiStack stack(env.nx(), env.ny(), config.k, env.z_max());
  Rng rng(config.seed);
  run.terminated_by = detail::greedy_steps(env, config, candidates, rng, stack, run.sensors, run.trace, jobs);
  return run;
}

}  // namespace kcover

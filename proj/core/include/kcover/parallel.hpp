#pragma once

#include <utility>
#include <vector>

#include "kcover/greedy.hpp"

namespace kcover {

// Ensemble of k independent single-coverage greedy runs. Each run chases the
// stricter per-run target tau_1 = 1 - (1 - tau)/k; if every run gets there,
// the union covers at least tau at order k (worst case: the uncovered
// order-< k region is the union of the runs' uncovered order-1 regions).
struct ParallelConfig {
  int k = 3;
  double epsilon = 0.01;
  double tau = 0.9;
  int max_sensors_per_run = 200;
  VisibilityMethod visibility_method = VisibilityMethod::sweep;
  CandidatePolicy candidate_policy = CandidatePolicy::streets;
  // When a capped ensemble falls short of tau, keep placing order-k greedy
  // sensors on the merged stack. Off by default: the published algorithm
  // stops at the union and the cap is reported as-is.
  bool top_up = false;
  std::uint64_t seed = 0;

  double tau_per_run() const { return 1.0 - (1.0 - tau) / k; }
  void validate() const;
};

// Runs each of the k ensembles with rng seeded by mix_seed(seed, run+1), so
// results do not depend on execution order. Run l starts with one uniformly
// random candidate sensor, then follows epsilon-greedy steps with single
// coverage (weights = {1}) until its target or its cap. The merged output
// interleaves the runs' sensors round-robin; its trace re-evaluates coverage
// at orders 1..k on the merged stack after every sensor, while each step's
// gain and band size are copied from the run that placed it.
PlacementRun parallel_greedy_place(const Environment& env, const ParallelConfig& config,
                                   const CellMask* candidates_override = nullptr, int jobs = 1);

// Round-robin interleaving of the per-run sensor lists plus an order-k stack
// holding every sensor's occlusion field. Duplicate poses stack.
std::pair<std::vector<SensorPose>, PsiStack> merge_runs(const Environment& env,
                                                        const std::vector<std::vector<SensorPose>>& runs, int k,
                                                        VisibilityMethod method = VisibilityMethod::sweep);

}  // namespace kcover

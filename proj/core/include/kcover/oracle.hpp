#pragma once

#include <cstddef>
#include <vector>

#include "kcover/greedy.hpp"

namespace kcover::oracle {

// Direct evaluation of the coverage objective: each column's free interval is
// cut into z_levels equal slabs, the order of visibility is counted at every
// slab midpoint by summing per-sensor indicators from independent exact
// fields, and volumes are Riemann sums. Shares nothing with the analytic
// column integration it is used to validate. Error is bounded by one slab per
// psi breakpoint per column.
double brute_force_fk(const Environment& env, const std::vector<SensorPose>& sensors, const Weights& weights,
                      int z_levels);

struct OptimalResult {
  std::vector<SensorPose> poses;
  double value = 0.0;
};

// Exhaustive maximizer of the objective over all size-l multisets of
// candidate cells (repetition allowed; a pose may host several sensors).
// Candidates are ordered row-major and enumerated lexicographically; among
// equal-value optima the first one wins. Visibility is always the exact
// field. Throws EnumerationTooLarge when the multiset count exceeds the cap.
OptimalResult optimal_placement(const Environment& env, int l, int k, const Weights& weights,
                                const CellMask& candidates, std::size_t enumeration_cap = 2'000'000);

struct TheoremCheck {
  int n = 0;       // greedy prefix length
  int l = 0;       // optimal budget
  double lhs = 0.0;  // objective of the greedy prefix
  double rhs = 0.0;  // (1 - e^{-(1-eps) n/l}) * optimal value
  bool pass = false;
};

struct TheoremReport {
  std::vector<TheoremCheck> checks;
  bool all_pass = true;
  std::vector<SensorPose> greedy_sensors;
};

// Runs the greedy placement, then checks
//   f(P_n) >= (1 - e^{-(1-eps) n/l}) * f(P*_l)
// for every prefix n and every l <= l_max, with both sides evaluated by the
// same arithmetic path. The comparison is a plain >=, no tolerance: a failure
// means a bug. The guarantee covers gains measured by the reference field, so
// the run is forced to exact visibility regardless of the config; a sweep-
// approximated band could admit a sensor whose true gain is below (1-eps) of
// the true maximum.
TheoremReport verify_theorem_bound(const Environment& env, const GreedyConfig& config, int l_max,
                                   const CellMask* candidates_override = nullptr,
                                   std::size_t enumeration_cap = 2'000'000);

}  // namespace kcover::oracle

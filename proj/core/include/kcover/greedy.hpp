#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kcover/coverage.hpp"
#include "kcover/env.hpp"
#include "kcover/rng.hpp"
#include "kcover/visibility.hpp"

namespace kcover {

enum class CandidatePolicy { streets, all_free_cells };
enum class Termination { order_k, mean_order };
enum class TerminatedBy { threshold, cap, zero_gain, exhausted };

std::string to_string(CandidatePolicy p);
std::string to_string(Termination t);
std::string to_string(TerminatedBy t);
CandidatePolicy parse_candidate_policy(const std::string& s);
Termination parse_termination(const std::string& s);
TerminatedBy parse_terminated_by(const std::string& s);

// Gains below this are treated as zero by the band rule and by the optional
// zero-gain stop.
inline constexpr double kZeroGainTolerance = 1e-12;

struct GreedyConfig {
  int k = 3;
  Weights weights = Weights::halving(3);
  double epsilon = 0.01;
  double tau = 0.9;
  int max_sensors = 200;
  bool stop_on_zero_gain = false;
  VisibilityMethod visibility_method = VisibilityMethod::sweep;
  CandidatePolicy candidate_policy = CandidatePolicy::streets;
  Termination termination = Termination::order_k;
  std::uint64_t seed = 0;

  void validate() const;
};

struct TraceStep {
  std::vector<double> frac;  // coverage fraction at orders 1..k after this sensor
  Cell selected;
  double gain = 0.0;
  std::size_t band_size = 0;
};

struct PlacementRun {
  std::string method;  // "greedy" | "parallel" | "random"
  GreedyConfig config;
  std::vector<SensorPose> sensors;
  std::vector<TraceStep> trace;
  TerminatedBy terminated_by = TerminatedBy::threshold;
  std::vector<PlacementRun> sub_runs;  // parallel ensembles only
};

// Vol_order / Vol(free space).
double coverage_fraction(const PsiStack& stack, const Environment& env, int order);

// Uniform draw among candidates with G >= (1 - epsilon) * max G, listed in
// row-major order. A max at or below kZeroGainTolerance widens the band to
// every candidate. Consumes exactly one rng draw.
Cell select_epsilon_band(const GainField& field, double epsilon, Rng& rng, std::size_t* band_size_out = nullptr);

// Candidate cells for a policy: street cells (h_obs = 0) or every cell with
// free space above it (h_obs < z_max).
CellMask candidate_mask(const Environment& env, CandidatePolicy policy);

// One epsilon-greedy run. Each step evaluates the gain of every candidate,
// draws from the epsilon band, and inserts the chosen sensor's occlusion
// field. Stops when the coverage criterion reaches tau, the sensor cap is
// hit, or (if enabled) the best gain is zero. Deterministic given the seed,
// for any jobs value.
PlacementRun greedy_place(const Environment& env, const GreedyConfig& config,
                          const CellMask* candidates_override = nullptr, int jobs = 1);

namespace detail {

// Runs greedy steps on existing state until termination; appends to sensors
// and trace. Shared by greedy_place, the per-run loop of the parallel
// ensemble, and its top-up phase.
TerminatedBy greedy_steps(const Environment& env, const GreedyConfig& config, const CellMask& candidates, Rng& rng,
                          PsiStack& stack, std::vector<SensorPose>& sensors, std::vector<TraceStep>& trace, int jobs);

bool reached_target(const PsiStack& stack, const Environment& env, const GreedyConfig& config);
std::vector<double> fraction_per_order(const PsiStack& stack, const Environment& env);

}  // namespace detail

}  // namespace kcover

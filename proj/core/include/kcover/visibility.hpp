#pragma once

#include <string>
#include <vector>

#include "kcover/env.hpp"
#include "kcover/types.hpp"

namespace kcover {

enum class VisibilityMethod { exact, sweep };

std::string to_string(VisibilityMethod m);
VisibilityMethod parse_visibility_method(const std::string& s);

// Per-column minimal visible height g for one sensor. Columns the sensor never
// sees below the ceiling hold the sentinel value z_max exactly, so
// (z_max - max(g, h))+ = 0 without branching. Invariant: g[c] >= h_obs[c].
struct OcclusionField {
  SensorPose sensor;
  int nx = 0;
  int ny = 0;
  double z_max = 0.0;
  std::vector<double> g;
};

// Reference semantics. The 2-D segment between cell centers is walked cell by
// cell (DDA); each intermediate cell contributes the height its rooftop edge
// projects to at the target column, sampled at the chord midpoint:
//   g(y) = max( h_obs(y), max over cells p of  z_s + (h_obs(p) - z_s) / t_mid(p) )
// where t_mid is the midpoint of the cell's chord in [0,1] segment parameter
// (distance ratios d(y)/d(p) reduce to 1/t_mid). The sensor's own cell and the
// target cell are excluded: a sensor sees its own column above h_obs and a
// rooftop point is visible at its own height. Boundary-crossing parameters are
// small rationals; stepping decisions compare them in integer arithmetic, so
// corner ties and 90-degree grid rotations are handled exactly.
OcclusionField occlusion_field_exact(const Environment& env, SensorPose sensor);

// O(nx*ny) approximation. One ray is walked to each boundary cell, carrying
// the steepest blocking line seen so far; every crossed cell samples that line
// at its chord midpoint. A cell keeps the sample from the ray passing nearest
// its center, so axis and diagonal columns coincide with the exact field and
// elsewhere the assigning ray misses the center by less than half a cell;
// disagreements concentrate on shadow boundaries.
OcclusionField occlusion_field_sweep(const Environment& env, SensorPose sensor);

OcclusionField occlusion_field(const Environment& env, SensorPose sensor, VisibilityMethod method);

// mask[c] = g[c] <= z. The free-space condition h_obs[c] <= z is implied by
// the field invariant g >= h_obs. At z = z_max the comparison is <=, so
// sentinel columns are included; callers querying the ceiling itself must
// accept that boundary convention.
CellMask visibility_at_height(const OcclusionField& field, double z);

namespace detail {

// Scratch-buffer variants used by hot loops (one field per candidate per
// greedy step); the public functions wrap these with fresh allocations.
void occlusion_field_exact_into(const Environment& env, SensorPose sensor, OcclusionField& out);
void occlusion_field_sweep_into(const Environment& env, SensorPose sensor, OcclusionField& out,
                                std::vector<double>& work);
void validate_sensor(const Environment& env, SensorPose sensor);

}  // namespace detail

}  // namespace kcover

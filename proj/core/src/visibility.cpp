#include "kcover/visibility.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

namespace kcover {

std::string to_string(VisibilityMethod m) { return m == VisibilityMethod::exact ? "exact" : "sweep"; }

VisibilityMethod parse_visibility_method(const std::string& s) {
  if (s == "exact") return VisibilityMethod::exact;
  if (s == "sweep") return VisibilityMethod::sweep;
  throw InvalidArgument("unknown visibility method '" + s + "' (expected exact|sweep)");
}

namespace detail {

void validate_sensor(const Environment& env, SensorPose sensor) {
  if (!env.spec().in_bounds(sensor.cell.i, sensor.cell.j))
    throw OutOfBounds("sensor cell (" + std::to_string(sensor.cell.i) + ", " + std::to_string(sensor.cell.j) +
                      ") outside grid");
  double h = env.height(sensor.cell.i, sensor.cell.j);
  if (!(sensor.z_s >= h) || !(sensor.z_s <= env.z_max()))
    throw InvalidArgument("sensor height " + std::to_string(sensor.z_s) + " outside [h_obs, z_max] at its cell");
}

namespace {

// Occlusion height at one target column. Boundary crossings of the segment
// between cell centers have parameters (2a-1)/(2|di|) on the x axis and
// (2b-1)/(2|dj|) on the y axis; the next crossing is picked by comparing
// (2a-1)*|dj| with (2b-1)*|di| in int64, so a tie (corner hit) is detected
// exactly and steps both axes at once. Chord midpoints are formed as exact
// rationals before the one rounding division.
double occlusion_at(const Environment& env, int si, int sj, double z_s, int ti, int tj) {
  const double h_t = env.height(ti, tj);
  const int di = ti - si, dj = tj - sj;
  const long long adi = std::abs(di), adj = std::abs(dj);
  const int stepi = (di > 0) - (di < 0), stepj = (dj > 0) - (dj < 0);

  double best = h_t;
  int ci = si, cj = sj;
  long long ax = 1, by = 1;          // ordinal of the next crossing per axis
  long long pn = 0, pd = 1;          // previous crossing as a rational pn/pd
  const long long dx2 = 2 * adi, dy2 = 2 * adj;

  while (ci != ti || cj != tj) {
    bool step_x, step_y;
    long long nn, nd;                // next crossing
    if (adj == 0) {
      step_x = true; step_y = false;
      nn = 2 * ax - 1; nd = dx2;
    } else if (adi == 0) {
      step_x = false; step_y = true;
      nn = 2 * by - 1; nd = dy2;
    } else {
      const long long key_x = (2 * ax - 1) * adj, key_y = (2 * by - 1) * adi;
      step_x = key_x <= key_y;
      step_y = key_y <= key_x;
      if (step_x) { nn = 2 * ax - 1; nd = dx2; }
      else        { nn = 2 * by - 1; nd = dy2; }
    }
    if (ci != si || cj != sj) {
      // chord midpoint (pn/pd + nn/nd)/2, numerator/denominator exact in int64
      const double t_mid = static_cast<double>(pn * nd + nn * pd) / static_cast<double>(2 * pd * nd);
      const double h = env.height(ci, cj);
      best = std::max(best, z_s + (h - z_s) / t_mid);
    }
    if (step_x) { ci += stepi; ++ax; }
    if (step_y) { cj += stepj; ++by; }
    pn = nn; pd = nd;
  }
  return best;
}

}  // namespace

void occlusion_field_exact_into(const Environment& env, SensorPose sensor, OcclusionField& out) {
  validate_sensor(env, sensor);
  const int nx = env.nx(), ny = env.ny();
  const double z_max = env.z_max();
  out.sensor = sensor;
  out.nx = nx;
  out.ny = ny;
  out.z_max = z_max;
  out.g.resize(env.spec().cell_count());
  const int si = sensor.cell.i, sj = sensor.cell.j;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const std::size_t c = env.spec().index(i, j);
      if (i == si && j == sj) {
        out.g[c] = env.height(i, j);
      } else {
        out.g[c] = std::min(occlusion_at(env, si, sj, sensor.z_s, i, j), z_max);
      }
    }
  }
}

void occlusion_field_sweep_into(const Environment& env, SensorPose sensor, OcclusionField& out,
                                std::vector<double>& work) {
  validate_sensor(env, sensor);
  const int nx = env.nx(), ny = env.ny();
  const double z_max = env.z_max();
  const double z_s = sensor.z_s;
  const int si = sensor.cell.i, sj = sensor.cell.j;
  out.sensor = sensor;
  out.nx = nx;
  out.ny = ny;
  out.z_max = z_max;
  out.g.resize(env.spec().cell_count());
  // work[c] = lateral offset of the assigning ray from cell c's center; a
  // better aligned ray may overwrite, infinity marks untouched cells.
  work.assign(env.spec().cell_count(), std::numeric_limits<double>::infinity());

  const auto idx = [nx](int i, int j) { return static_cast<std::size_t>(j) * nx + i; };
  const double h_s = env.height(si, sj);
  out.g[idx(si, sj)] = h_s;
  work[idx(si, sj)] = -1.0;

  // One ray per boundary cell. Crossing parameters are scaled to integer keys,
  // t = key / den with den = 2*adi*adj off axis (2*adi or 2*adj on axis), so
  // stepping and corner ties follow the same arithmetic as the exact walk and
  // chord midpoints live at (pk + nk) / (2*den). The steepest blocking line is
  // carried as a slope per key unit; each crossed cell samples it at its own
  // chord midpoint, which on the ray's center line telescopes to the exact
  // per-column value.
  const auto cast_ray = [&](int ti, int tj) {
    const int di = ti - si, dj = tj - sj;
    const long long adi = std::abs(di), adj = std::abs(dj);
    const int stepi = (di > 0) - (di < 0), stepj = (dj > 0) - (dj < 0);
    const double inv_len = 1.0 / std::hypot(static_cast<double>(di), static_cast<double>(dj));
    double sigma = -std::numeric_limits<double>::infinity();
    long long ax = 1, by = 1, pk = 0;
    int ci = si, cj = sj;
    while (ci != ti || cj != tj) {
      bool step_x, step_y;
      long long nk;
      if (adj == 0) {
        step_x = true;
        step_y = false;
        nk = 2 * ax - 1;
      } else if (adi == 0) {
        step_x = false;
        step_y = true;
        nk = 2 * by - 1;
      } else {
        const long long key_x = (2 * ax - 1) * adj, key_y = (2 * by - 1) * adi;
        step_x = key_x <= key_y;
        step_y = key_y <= key_x;
        nk = step_x ? key_x : key_y;
      }
      if (ci != si || cj != sj) {
        const double kmid = static_cast<double>(pk + nk);
        const double line = z_s + sigma * kmid;
        const double h = env.height(ci, cj);
        const std::size_t c = idx(ci, cj);
        const long long cross = static_cast<long long>(di) * (cj - sj) - static_cast<long long>(dj) * (ci - si);
        const double off = std::abs(static_cast<double>(cross)) * inv_len;
        if (off < work[c]) {
          work[c] = off;
          out.g[c] = std::min(std::max(h, line), z_max);
        }
        if (h > line) sigma = (h - z_s) / kmid;
      }
      if (step_x) { ci += stepi; ++ax; }
      if (step_y) { cj += stepj; ++by; }
      pk = nk;
    }
    // endpoint center sits at t = 1; its own ray is exactly aligned
    const long long den = adj == 0 ? 2 * adi : adi == 0 ? 2 * adj : 2 * adi * adj;
    const std::size_t c = idx(ti, tj);
    if (work[c] > 0.0) {
      work[c] = 0.0;
      out.g[c] = std::min(std::max(env.height(ti, tj), z_s + sigma * static_cast<double>(2 * den)), z_max);
    }
  };

  for (int i = 0; i < nx; ++i) {
    if (i != si || 0 != sj) cast_ray(i, 0);
    if (ny > 1 && (i != si || ny - 1 != sj)) cast_ray(i, ny - 1);
  }
  for (int j = 1; j + 1 < ny; ++j) {
    if (0 != si || j != sj) cast_ray(0, j);
    if (nx > 1 && (nx - 1 != si || j != sj)) cast_ray(nx - 1, j);
  }

  // Rays can corner-graze past a cell; anything untouched falls back to the
  // exact per-column walk (a handful of cells at most).
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const std::size_t c = idx(i, j);
      if (work[c] == std::numeric_limits<double>::infinity())
        out.g[c] = std::min(occlusion_at(env, si, sj, z_s, i, j), z_max);
    }
}

}  // namespace detail

OcclusionField occlusion_field_exact(const Environment& env, SensorPose sensor) {
  OcclusionField out;
  detail::occlusion_field_exact_into(env, sensor, out);
  return out;
}

OcclusionField occlusion_field_sweep(const Environment& env, SensorPose sensor) {
  OcclusionField out;
  std::vector<double> work;
  detail::occlusion_field_sweep_into(env, sensor, out, work);
  return out;
}

OcclusionField occlusion_field(const Environment& env, SensorPose sensor, VisibilityMethod method) {
  return method == VisibilityMethod::exact ? occlusion_field_exact(env, sensor) : occlusion_field_sweep(env, sensor);
}

CellMask visibility_at_height(const OcclusionField& field, double z) {
  if (!(z >= 0.0) || !(z <= field.z_max)) throw InvalidArgument("visibility_at_height: z outside [0, z_max]");
  CellMask mask(field.nx, field.ny, false);
  for (std::size_t c = 0; c < field.g.size(); ++c) mask.v[c] = field.g[c] <= z ? 1 : 0;
  return mask;
}

}  // namespace kcover

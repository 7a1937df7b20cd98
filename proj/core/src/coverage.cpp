#include "kcover/coverage.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kcover/detail/parallel_for.hpp"

namespace kcover {

Weights::Weights(std::vector<double> values, bool allow_nonmonotone) : w(std::move(values)) {
  if (w.empty()) throw InvalidWeights("weights: need at least w_1");
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!(w[i] >= 0.0) || !std::isfinite(w[i]))
      throw InvalidWeights("weights: w_" + std::to_string(i + 1) + " must be finite and >= 0");
    if (i > 0 && w[i] > w[i - 1] && !allow_nonmonotone)
      throw InvalidWeights("weights: w_" + std::to_string(i + 1) + " > w_" + std::to_string(i) +
                           "; increasing weights need the explicit override");
  }
}

Weights Weights::halving(int k) {
  if (k < 1) throw InvalidWeights("weights: k must be >= 1");
  std::vector<double> w(static_cast<std::size_t>(k));
  double v = 1.0;
  for (int i = 0; i < k; ++i, v *= 0.5) w[i] = v;
  return Weights(std::move(w));
}

double nmin(std::vector<double> values, int n) {
  if (n < 1 || static_cast<std::size_t>(n) > values.size())
    throw OrderExceedsCount("nmin: order " + std::to_string(n) + " of " + std::to_string(values.size()) + " values");
  std::nth_element(values.begin(), values.begin() + (n - 1), values.end());
  return values[n - 1];
}

PsiStack::PsiStack(int nx, int ny, int k, double z_max) : nx_(nx), ny_(ny), k_(k), z_max_(z_max) {
  GridSpec{nx, ny, 1.0, z_max}.validate();
  if (k < 1) throw InvalidArgument("PsiStack: k must be >= 1");
  data_.assign(static_cast<std::size_t>(nx) * ny * k, z_max);
}

namespace {

void check_grid(const PsiStack& stack, int nx, int ny, double z_max, const char* what) {
  if (stack.nx() != nx || stack.ny() != ny || stack.z_max() != z_max)
    throw GridMismatch(std::string(what) + ": stack grid " + std::to_string(stack.nx()) + "x" +
                       std::to_string(stack.ny()) + " does not match " + std::to_string(nx) + "x" +
                       std::to_string(ny));
}

}  // namespace

void PsiStack::insert_field(const OcclusionField& field) {
  check_grid(*this, field.nx, field.ny, field.z_max, "psi_insert");
  const std::size_t n = cell_count();
  const int k = k_;
  for (std::size_t c = 0; c < n; ++c) {
    double* row = data_.data() + c * k;
    const double g = field.g[c];
    int p = k;
    while (p > 0 && row[p - 1] > g) --p;  // insert after equal values
    if (p < k) {
      for (int i = k - 1; i > p; --i) row[i] = row[i - 1];
      row[p] = g;
    }
  }
  ++inserted_;
}

PsiStack psi_insert(PsiStack stack, const OcclusionField& field) {
  stack.insert_field(field);
  return stack;
}

int order_of_visibility(const PsiStack& stack, std::size_t column, double z) {
  const int k = stack.k();
  int count = 0;
  while (count < k && stack.psi(column, count) <= z) ++count;
  return count;
}

std::vector<double> coverage_volumes(const PsiStack& stack, const Environment& env) {
  check_grid(stack, env.nx(), env.ny(), env.z_max(), "coverage_volumes");
  const int k = stack.k();
  const double z_max = env.z_max();
  std::vector<double> vol(static_cast<std::size_t>(k), 0.0);
  const std::size_t n = stack.cell_count();
  for (std::size_t c = 0; c < n; ++c) {
    const double h = env.heights()[c];
    for (int i = 0; i < k; ++i) vol[i] += std::max(0.0, z_max - std::max(stack.psi(c, i), h));
  }
  const double area = env.cell_size() * env.cell_size();
  for (double& v : vol) v *= area;
  return vol;
}

double f_k(const PsiStack& stack, const Environment& env, const Weights& weights) {
  if (weights.k() != stack.k()) throw WeightCountMismatch("f_k: " + std::to_string(weights.k()) + " weights for k = " +
                                                          std::to_string(stack.k()));
  const std::vector<double> vol = coverage_volumes(stack, env);
  double total = 0.0;
  for (int i = 0; i < stack.k(); ++i) total += weights.w[i] * vol[i];
  return total;
}

namespace {

// Accumulates raw per-order increments (cell_size^2 applied by the caller).
void gain_accumulate(const PsiStack& stack, const Environment& env, const OcclusionField& field, double* v_raw) {
  const int k = stack.k();
  const std::size_t n = stack.cell_count();
  const std::vector<double>& h_obs = env.heights();
  for (std::size_t c = 0; c < n; ++c) {
    const double g = field.g[c];
    const double* row = &stack.data()[c * k];
    int p = 0;
    while (p < k && row[p] <= g) ++p;
    if (p == k) continue;
    const double h = h_obs[c];
    v_raw[p] += std::max(row[p], h) - std::max(g, h);
    for (int i = p + 1; i < k; ++i) v_raw[i] += std::max(row[i], h) - std::max(row[i - 1], h);
  }
}

}  // namespace

GainResult gain(const PsiStack& stack, const Environment& env, const Weights& weights, const OcclusionField& field) {
  check_grid(stack, env.nx(), env.ny(), env.z_max(), "gain");
  check_grid(stack, field.nx, field.ny, field.z_max, "gain");
  if (weights.k() != stack.k()) throw WeightCountMismatch("gain: weight count != k");
  const int k = stack.k();
  GainResult result;
  result.V.assign(static_cast<std::size_t>(k), 0.0);
  gain_accumulate(stack, env, field, result.V.data());
  const double area = env.cell_size() * env.cell_size();
  for (double& v : result.V) v *= area;
  for (int i = 0; i < k; ++i) result.G += weights.w[i] * result.V[i];
  return result;
}

double gain_closed_form(const PsiStack& stack, const Environment& env, const Weights& weights,
                        const OcclusionField& field) {
  check_grid(stack, env.nx(), env.ny(), env.z_max(), "gain_closed_form");
  check_grid(stack, field.nx, field.ny, field.z_max, "gain_closed_form");
  if (weights.k() != stack.k()) throw WeightCountMismatch("gain_closed_form: weight count != k");
  const int k = stack.k();
  const std::vector<double>& w = weights.w;

  // integrand value as a function of the pre-insertion order O
  std::vector<double> rho(static_cast<std::size_t>(k) + 1);
  for (int o = 0; o <= k; ++o) {
    double r = w[0] - (o >= k ? w[k - 1] : 0.0);
    for (int i = 1; i <= k - 1; ++i)
      if (o >= i) r += w[i] - w[i - 1];
    rho[o] = r;
  }

  const double z_max = env.z_max();
  const std::size_t n = stack.cell_count();
  double total = 0.0;
  for (std::size_t c = 0; c < n; ++c) {
    const double h = env.heights()[c];
    const double lo = std::max(field.g[c], h);
    if (!(lo < z_max)) continue;
    const double* row = &stack.data()[c * k];
    int o = 0;
    while (o < k && row[o] <= lo) ++o;
    double z = lo, col = 0.0;
    while (z < z_max) {
      const double zn = o < k ? row[o] : z_max;
      col += rho[o] * (zn - z);
      z = zn;
      if (o < k) ++o; else break;
    }
    total += col;
  }
  return total * env.cell_size() * env.cell_size();
}

GainField gain_field(const Environment& env, const PsiStack& stack, const Weights& weights,
                     const CellMask& candidates, VisibilityMethod method, int jobs) {
  check_grid(stack, env.nx(), env.ny(), env.z_max(), "gain_field");
  if (candidates.nx != env.nx() || candidates.ny != env.ny()) throw GridMismatch("gain_field: candidate mask grid");
  if (weights.k() != stack.k()) throw WeightCountMismatch("gain_field: weight count != k");

  std::vector<Cell> cells;
  for (int j = 0; j < env.ny(); ++j)
    for (int i = 0; i < env.nx(); ++i)
      if (candidates.at(i, j)) cells.push_back({i, j});
  if (cells.empty()) throw EmptyCandidateSet("gain_field: no candidate cells");

  const int k = stack.k();
  const std::size_t n = env.spec().cell_count();
  GainField gf;
  gf.nx = env.nx();
  gf.ny = env.ny();
  gf.k = k;
  gf.candidates = candidates;
  gf.G.assign(n, -1.0);
  gf.V.assign(n * k, -1.0);

  const double area = env.cell_size() * env.cell_size();
  detail::parallel_for(cells.size(), jobs, [&](std::size_t begin, std::size_t end, int) {
    OcclusionField field;
    std::vector<double> work;
    std::vector<double> v_raw(static_cast<std::size_t>(k));
    for (std::size_t idx = begin; idx < end; ++idx) {
      const Cell cell = cells[idx];
      const SensorPose pose{cell, env.height(cell.i, cell.j)};
      if (method == VisibilityMethod::exact)
        detail::occlusion_field_exact_into(env, pose, field);
      else
        detail::occlusion_field_sweep_into(env, pose, field, work);
      std::fill(v_raw.begin(), v_raw.end(), 0.0);
      gain_accumulate(stack, env, field, v_raw.data());
      const std::size_t c = env.spec().index(cell.i, cell.j);
      double g_total = 0.0;
      for (int i = 0; i < k; ++i) {
        const double vi = v_raw[i] * area;
        gf.V[static_cast<std::size_t>(i) * n + c] = vi;
        g_total += weights.w[i] * vi;
      }
      gf.G[c] = g_total;
    }
  });

  gf.max_gain = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < n; ++c) {
    if (!candidates.v[c]) continue;
    if (gf.G[c] > gf.max_gain) {
      gf.max_gain = gf.G[c];
      gf.argmax_cell = {static_cast<int>(c % gf.nx), static_cast<int>(c / gf.nx)};
    }
  }
  return gf;
}

}  // namespace kcover

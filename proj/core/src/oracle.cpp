#include "kcover/oracle.hpp"

#include <algorithm>
#include <cmath>

namespace kcover::oracle {

double brute_force_fk(const Environment& env, const std::vector<SensorPose>& sensors, const Weights& weights,
                      int z_levels) {
  if (z_levels < 1) throw InvalidArgument("brute_force_fk: z_levels must be >= 1");
  const int k = weights.k();
  std::vector<OcclusionField> fields;
  fields.reserve(sensors.size());
  for (const SensorPose& pose : sensors) fields.push_back(occlusion_field_exact(env, pose));

  const double z_max = env.z_max();
  double total = 0.0;
  for (std::size_t c = 0; c < env.spec().cell_count(); ++c) {
    const double h = env.heights()[c];
    const double extent = z_max - h;
    if (!(extent > 0.0)) continue;
    const double slab = extent / z_levels;
    double col = 0.0;
    for (int s = 0; s < z_levels; ++s) {
      const double z = h + (s + 0.5) * slab;
      int order = 0;
      for (const OcclusionField& f : fields) {
        if (f.g[c] <= z && ++order == k) break;
      }
      for (int i = 0; i < order; ++i) col += weights.w[i];
    }
    total += col * slab;
  }
  return total * env.cell_size() * env.cell_size();
}

namespace {

std::size_t multiset_count(std::size_t n, int l, std::size_t cap) {
  // C(n + l - 1, l); prefix products are themselves binomials, so the
  // division is exact at every step. Stops early once past the cap (the
  // prefix sequence is increasing while l << n).
  std::size_t count = 1;
  for (int i = 1; i <= l; ++i) {
    count = count * (n + static_cast<std::size_t>(l) - i) / static_cast<std::size_t>(i);
    if (count > cap) return count;
  }
  return count;
}

struct EnumState {
  const Environment* env;
  const Weights* weights;
  const std::vector<OcclusionField>* fields;
  int l;
  std::vector<int> chosen;
  std::vector<int> best_choice;
  double best_value = -1.0;
};

void enumerate(EnumState& st, int depth, int start, const PsiStack& stack) {
  if (depth == st.l) {
    const double value = f_k(stack, *st.env, *st.weights);
    if (value > st.best_value) {
      st.best_value = value;
      st.best_choice = st.chosen;
    }
    return;
  }
  for (int c = start; c < static_cast<int>(st.fields->size()); ++c) {
    st.chosen[depth] = c;
    PsiStack next = stack;
    next.insert_field((*st.fields)[c]);
    enumerate(st, depth + 1, c, next);
  }
}

}  // namespace

OptimalResult optimal_placement(const Environment& env, int l, int k, const Weights& weights,
                                const CellMask& candidates, std::size_t enumeration_cap) {
  if (l < 0) throw InvalidArgument("optimal_placement: negative budget");
  if (weights.k() != k) throw WeightCountMismatch("optimal_placement: weight count != k");
  std::vector<Cell> cells;
  for (int j = 0; j < env.ny(); ++j)
    for (int i = 0; i < env.nx(); ++i)
      if (candidates.at(i, j)) cells.push_back({i, j});
  if (cells.empty()) throw EmptyCandidateSet("optimal_placement: no candidate cells");

  OptimalResult result;
  if (l == 0) return result;

  const std::size_t count = multiset_count(cells.size(), l, enumeration_cap);
  if (count > enumeration_cap)
    throw EnumerationTooLarge("optimal_placement: about " + std::to_string(count) + " multisets exceed the cap of " +
                              std::to_string(enumeration_cap));

  std::vector<OcclusionField> fields;
  fields.reserve(cells.size());
  for (const Cell& cell : cells) fields.push_back(occlusion_field_exact(env, SensorPose{cell, env.height(cell.i, cell.j)}));

  EnumState st;
  st.env = &env;
  st.weights = &weights;
  st.fields = &fields;
  st.l = l;
  st.chosen.assign(static_cast<std::size_t>(l), 0);
  enumerate(st, 0, 0, PsiStack(env.nx(), env.ny(), k, env.z_max()));

  result.value = st.best_value;
  for (int c : st.best_choice) result.poses.push_back(fields[static_cast<std::size_t>(c)].sensor);
  return result;
}

TheoremReport verify_theorem_bound(const Environment& env, const GreedyConfig& config, int l_max,
                                   const CellMask* candidates_override, std::size_t enumeration_cap) {
  if (l_max < 1) throw InvalidArgument("verify_theorem_bound: l_max must be >= 1");
  GreedyConfig exact_config = config;
  exact_config.visibility_method = VisibilityMethod::exact;
  const CellMask candidates =
      candidates_override ? *candidates_override : candidate_mask(env, exact_config.candidate_policy);

  TheoremReport report;
  const PlacementRun run = greedy_place(env, exact_config, &candidates);
  report.greedy_sensors = run.sensors;

  // objective value of every greedy prefix, one insertion at a time
  std::vector<double> prefix_value;
  PsiStack stack(env.nx(), env.ny(), exact_config.k, env.z_max());
  for (const SensorPose& pose : run.sensors) {
    stack.insert_field(occlusion_field_exact(env, pose));
    prefix_value.push_back(f_k(stack, env, exact_config.weights));
  }

  for (int l = 1; l <= l_max; ++l) {
    const OptimalResult opt =
        optimal_placement(env, l, exact_config.k, exact_config.weights, candidates, enumeration_cap);
    for (int n = 1; n <= static_cast<int>(prefix_value.size()); ++n) {
      TheoremCheck check;
      check.n = n;
      check.l = l;
      check.lhs = prefix_value[static_cast<std::size_t>(n) - 1];
      check.rhs = (1.0 - std::exp(-(1.0 - exact_config.epsilon) * n / l)) * opt.value;
      check.pass = check.lhs >= check.rhs;
      report.all_pass = report.all_pass && check.pass;
      report.checks.push_back(check);
    }
  }
  return report;
}

}  // namespace kcover::oracle

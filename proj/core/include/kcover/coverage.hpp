#pragma once

#include <cstddef>
#include <vector>

#include "kcover/env.hpp"
#include "kcover/types.hpp"
#include "kcover/visibility.hpp"

namespace kcover {

// Per-order weights w_1..w_k. Non-increasing non-negative weights are required
// by default; the diminishing-returns guarantee of the gain only holds then.
// An explicit override admits arbitrary non-negative weights for
// experimentation and voids that guarantee.
struct Weights {
  std::vector<double> w;

  explicit Weights(std::vector<double> values, bool allow_nonmonotone = false);
  static Weights halving(int k);  // 1, 1/2, 1/4, ...
  int k() const { return static_cast<int>(w.size()); }
};

// n-th smallest element of a multiset, counted with multiplicity.
double nmin(std::vector<double> values, int n);

// Per-column sorted list psi_1 <= ... <= psi_k of the k smallest occlusion
// heights among inserted sensors, initialized to the z_max sentinel. Column
// slots are contiguous: data[c*k + i]. A point (c, z) is covered with order
// >= i exactly when psi_i <= z.
class PsiStack {
 public:
  PsiStack(int nx, int ny, int k, double z_max);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  int k() const { return k_; }
  double z_max() const { return z_max_; }
  std::size_t cell_count() const { return data_.size() / k_; }
  double psi(std::size_t column, int i) const { return data_[column * k_ + i]; }
  const std::vector<double>& data() const { return data_; }
  std::vector<double>& mutable_data() { return data_; }

  void insert_field(const OcclusionField& field);
  int inserted_count() const { return inserted_; }

 private:
  int nx_, ny_, k_;
  double z_max_;
  int inserted_ = 0;
  std::vector<double> data_;
};

// Sorted insert of a field's g values, one column at a time; the largest slot
// falls off. Takes the stack by value so callers keep the original by copying
// or pass ownership with std::move.
PsiStack psi_insert(PsiStack stack, const OcclusionField& field);

// Count of i with psi_i <= z, capped at k. Zero below h_obs comes for free
// since every psi_i >= h_obs of its column.
int order_of_visibility(const PsiStack& stack, std::size_t column, double z);

// Vol_i = sum over columns of (z_max - max(psi_i, h_obs))+ * cell_size^2,
// the volume of free space covered with order >= i. Antitone in i.
std::vector<double> coverage_volumes(const PsiStack& stack, const Environment& env);

// Objective: sum_i w_i * Vol_i.
double f_k(const PsiStack& stack, const Environment& env, const Weights& weights);

struct GainResult {
  double G = 0.0;
  std::vector<double> V;  // per-order volume increments, all >= 0
};

// Marginal value of adding one sensor: V_i = Vol_i(after) - Vol_i(before)
// evaluated per column from the hypothetical insertion, G = sum w_i V_i.
// The stack is not modified.
GainResult gain(const PsiStack& stack, const Environment& env, const Weights& weights, const OcclusionField& field);

// Same quantity by an independent route: per column the integrand
//   w_1 - w_k * 1{O >= k} + sum_{i=1}^{k-1} (w_{i+1} - w_i) * 1{O >= i}
// is integrated over z in [max(g, h_obs), z_max], split at the psi
// breakpoints. Piecewise constant, so the integral is evaluated exactly.
double gain_closed_form(const PsiStack& stack, const Environment& env, const Weights& weights,
                        const OcclusionField& field);

// Gain of every candidate cell. Non-candidate cells hold the sentinel -1 in
// all planes. argmax is the first row-major cell attaining max_gain, fixed
// regardless of how many workers filled the planes.
struct GainField {
  int nx = 0, ny = 0, k = 0;
  std::vector<double> G;       // row-major plane
  std::vector<double> V;       // k planes, V[i * nx * ny + c]
  CellMask candidates{2, 2};
  double max_gain = 0.0;
  Cell argmax_cell;
};

GainField gain_field(const Environment& env, const PsiStack& stack, const Weights& weights,
                     const CellMask& candidates, VisibilityMethod method, int jobs = 1);

}  // namespace kcover

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "kcover/types.hpp"

namespace kcover {

/// 2.5-D environment: per-cell obstacle height h_obs on a uniform grid.
/// The free space of a column is the interval [h_obs, z_max]; its volume is
/// (z_max - h_obs) * cell_size^2. Immutable after construction.
class Environment {
 public:
  Environment(GridSpec spec, std::vector<double> h_obs);

  const GridSpec& spec() const { return spec_; }
  int nx() const { return spec_.nx; }
  int ny() const { return spec_.ny; }
  double cell_size() const { return spec_.cell_size; }
  double z_max() const { return spec_.z_max; }

  double height(int i, int j) const { return h_[spec_.index(i, j)]; }
  double height(std::size_t c) const { return h_[c]; }
  const std::vector<double>& heights() const { return h_; }

  /// Total free-space volume sum_c (z_max - h_obs[c]) * cell_size^2.
  double free_volume() const { return free_volume_; }

 private:
  GridSpec spec_;
  std::vector<double> h_;
  double free_volume_ = 0.0;
};

/// Validates and wraps a heightmap. Out-of-range heights are errors, never
/// clamped.
Environment make_environment(const GridSpec& spec, std::vector<double> h_obs);

/// Synthetic city generator parameters. Rectangles are drawn into a binary
/// occupancy grid; 4-connected components then get one uniform height each.
struct CityGenParams {
  std::pair<int, int> n_rect_range{8, 16};   // inclusive
  std::pair<int, int> rect_w_range{3, 10};   // cells, inclusive
  std::pair<int, int> rect_h_range{3, 10};   // cells, inclusive
  std::pair<double, double> height_range{0.2, 0.9};  // uniform on [lo, hi), inside (0, z_max]

  void validate(const GridSpec& spec) const;
};

/// Deterministic function of (spec, params, seed). Draw order per rectangle
/// is (w, h, x0, y0); components are labeled by row-major flood-fill
/// discovery order with one height draw each. If occupancy_out is non-null
/// it receives the rectangle occupancy grid (true = inside a building).
Environment generate_random_city(const GridSpec& spec, const CityGenParams& params, std::uint64_t seed,
                                 CellMask* occupancy_out = nullptr);

/// True exactly where h_obs = 0. May be all-false.
CellMask street_mask(const Environment& env);

/// Text format, round-trips bit-exactly:
///   KCOVER-ENV v1 nx ny cell_size z_max
///   <nx*ny heights, row-major, whitespace separated>
void save_environment(const Environment& env, const std::filesystem::path& path);
Environment load_environment(const std::filesystem::path& path);

/// 8/16-bit grayscale PGM (P2 or P5); pixel values map linearly onto
/// [0, z_max]. PGM row r becomes grid row j = r.
Environment import_pgm(const std::filesystem::path& path, double cell_size, double z_max);

}  // namespace kcover

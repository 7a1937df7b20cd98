#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "kcover/errors.hpp"

namespace kcover {

/// Uniform 2.5-D grid: nx columns (x index i), ny rows (y index j),
/// square cells of edge cell_size, and an evaluation ceiling z_max that
/// bounds every volume integral. Heights and z live in the same length
/// unit as cell_size.
struct GridSpec {
  int nx = 0;
  int ny = 0;
  double cell_size = 1.0;
  double z_max = 1.0;

  void validate() const {
    if (nx < 2 || ny < 2) throw InvalidArgument("GridSpec: nx and ny must be >= 2");
    if (!(cell_size > 0.0)) throw InvalidArgument("GridSpec: cell_size must be > 0");
    if (!(z_max > 0.0)) throw InvalidArgument("GridSpec: z_max must be > 0");
  }

  std::size_t cell_count() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
  bool in_bounds(int i, int j) const { return i >= 0 && i < nx && j >= 0 && j < ny; }
  /// Row-major cell index; row = y index j, column = x index i.
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(i);
  }

  bool operator==(const GridSpec&) const = default;
};

/// Grid cell address (i = x index, j = y index).
struct Cell {
  int i = 0;
  int j = 0;
  auto operator<=>(const Cell&) const = default;
};

/// Per-cell boolean plane, row-major, same shape as the heightmap.
struct CellMask {
  int nx = 0;
  int ny = 0;
  std::vector<std::uint8_t> v;

  CellMask() = default;
  CellMask(int nx, int ny, bool fill = false)
      : nx(nx), ny(ny), v(static_cast<std::size_t>(nx) * ny, fill ? 1 : 0) {}

  bool at(int i, int j) const { return v[static_cast<std::size_t>(j) * nx + i] != 0; }
  void set(int i, int j, bool b) { v[static_cast<std::size_t>(j) * nx + i] = b ? 1 : 0; }
  std::size_t count() const {
    std::size_t n = 0;
    for (auto b : v) n += b;
    return n;
  }

  bool operator==(const CellMask&) const = default;
};

/// A placed (or candidate) sensor: grid cell plus mount height z_s.
/// For street-restricted placement z_s = 0.
struct SensorPose {
  Cell cell;
  double z_s = 0.0;
  auto operator<=>(const SensorPose&) const = default;
};

}  // namespace kcover

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "eddie/core/types.hpp"

namespace eddie {

struct CellIndex {
  int x = 0;
  int y = 0;
  bool operator==(const CellIndex&) const = default;
};

// Axis-aligned raster placement. `origin` is the world pose of the lower-left
// corner of cell (0, 0); only theta == 0 grids are supported.
struct GridGeometry {
  double resolution = 0.05;
  int width = 0;
  int height = 0;
  Pose2D origin;

  std::size_t size() const { return static_cast<std::size_t>(width) * static_cast<std::size_t>(height); }
  bool contains(CellIndex c) const { return c.x >= 0 && c.y >= 0 && c.x < width && c.y < height; }
  std::size_t index(CellIndex c) const {
    return static_cast<std::size_t>(c.y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(c.x);
  }
  CellIndex cell_of(std::size_t idx) const {
    return {static_cast<int>(idx % static_cast<std::size_t>(width)),
            static_cast<int>(idx / static_cast<std::size_t>(width))};
  }
  // Cell containing a world point (may be out of bounds).
  CellIndex world_to_cell(double wx, double wy) const {
    return {static_cast<int>(std::floor((wx - origin.x) / resolution)),
            static_cast<int>(std::floor((wy - origin.y) / resolution))};
  }
  double cell_center_x(int cx) const { return origin.x + (cx + 0.5) * resolution; }
  double cell_center_y(int cy) const { return origin.y + (cy + 0.5) * resolution; }
  double max_x() const { return origin.x + width * resolution; }
  double max_y() const { return origin.y + height * resolution; }

  bool operator==(const GridGeometry&) const = default;
};

template <typename T>
struct Grid {
  GridGeometry geometry;
  std::vector<T> data;

  Grid() = default;
  Grid(GridGeometry g, T fill) : geometry(g), data(g.size(), fill) {
    if (!(g.resolution > 0.0)) throw std::invalid_argument("grid resolution must be > 0");
    if (g.width < 0 || g.height < 0) throw std::invalid_argument("grid dimensions must be >= 0");
  }

  T& at(CellIndex c) { return data[geometry.index(c)]; }
  const T& at(CellIndex c) const { return data[geometry.index(c)]; }
  int width() const { return geometry.width; }
  int height() const { return geometry.height; }
  bool contains(CellIndex c) const { return geometry.contains(c); }
};

// Log-odds occupancy belief; 0 means never observed (p = 0.5).
using OccupancyGrid = Grid<double>;

enum class CellState : std::uint8_t { kFree = 0, kOccupied = 1, kUnknown = 2 };
using TriStateMap = Grid<CellState>;

}  // namespace eddie

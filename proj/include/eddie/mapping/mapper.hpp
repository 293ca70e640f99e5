#pragma once

#include <cmath>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "eddie/core/geometry.hpp"
#include "eddie/core/grid.hpp"
#include "eddie/core/types.hpp"

namespace eddie::mapping {

struct MapperConfig {
  double l_hit = 0.85;
  double l_miss = -0.4;
  double l_min = -10.0;
  double l_max = 10.0;
  double occupied_threshold = 0.65;
  double free_threshold = 0.25;
  double resolution = 0.05;
  double grow_margin = 1.0;  // m added around new content when the grid grows

  void validate() const;
};

double occupancy_probability(double log_odds);

// Cells crossed by the segment a -> b in visiting order, both end cells
// included. Each crossed cell appears once (grid line walk).
std::vector<CellIndex> traverse(const GridGeometry& g, Point2 a, Point2 b);

// Returns geometry covering both `g` and the box [lo, hi], keeping the
// cell lattice of `g` (or anchoring a fresh one at multiples of resolution).
GridGeometry grow_to_cover(const GridGeometry& g, Point2 lo, Point2 hi, double margin);

// Copies `src` into a grid with geometry `g`; new cells get `fill`.
template <typename T>
Grid<T> regrid(const Grid<T>& src, const GridGeometry& g, T fill) {
  Grid<T> out(g, fill);
  if (src.geometry.size() == 0) return out;
  const int dx = static_cast<int>(std::lround((src.geometry.origin.x - g.origin.x) / g.resolution));
  const int dy = static_cast<int>(std::lround((src.geometry.origin.y - g.origin.y) / g.resolution));
  for (int y = 0; y < src.geometry.height; ++y)
    for (int x = 0; x < src.geometry.width; ++x) {
      const CellIndex c{x + dx, y + dy};
      if (g.contains(c)) out.at(c) = src.at({x, y});
    }
  return out;
}

// Log-odds update from one scan taken at `pose`. Cells between the sensor
// cell (exclusive) and the endpoint cell (exclusive) get l_miss, the
// endpoint cell gets l_hit. Beams without a return clear up to range_max;
// beams at or below range_min are ignored. The grid grows as needed.
void integrate_scan(OccupancyGrid& grid, const Pose2D& pose, const LaserScan& scan, const MapperConfig& cfg);

// One l_miss update for every cell whose centre lies inside `footprint`
// (world frame): the robot is standing there, so those cells are free.
// Cells outside the grid are skipped.
void clear_footprint(OccupancyGrid& grid, const Polygon& footprint, const MapperConfig& cfg);

TriStateMap to_tristate(const OccupancyGrid& grid, const MapperConfig& cfg);

class MapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// P5 graymap (0 occupied, 254 free, 205 unknown; top row first) plus a
// `<stem>.yaml` sidecar with resolution, origin, width and height.
void save_map(const TriStateMap& map, const std::filesystem::path& pgm_path);
TriStateMap load_map(const std::filesystem::path& pgm_path);

// Log-odds grid with cells pinned to l_max / l_min / 0.
OccupancyGrid from_tristate(const TriStateMap& map, const MapperConfig& cfg);

inline constexpr unsigned char kPgmOccupied = 0;
inline constexpr unsigned char kPgmFree = 254;
inline constexpr unsigned char kPgmUnknown = 205;

// Incremental mapper owning its grid.
class Mapper {
 public:
  explicit Mapper(MapperConfig cfg = {});
  void integrate(const Pose2D& pose, const LaserScan& scan) { integrate_scan(grid_, pose, scan, cfg_); }
  void clear(const Polygon& footprint) { clear_footprint(grid_, footprint, cfg_); }
  const OccupancyGrid& grid() const { return grid_; }
  TriStateMap tristate() const { return to_tristate(grid_, cfg_); }
  const MapperConfig& config() const { return cfg_; }

 private:
  MapperConfig cfg_;
  OccupancyGrid grid_;
};

}  // namespace eddie::mapping

#pragma once

#include <cstdint>

#include "eddie/core/geometry.hpp"
#include "eddie/core/grid.hpp"
#include "eddie/core/params.hpp"

namespace eddie::nav {

using Costmap = Grid<std::uint8_t>;

inline constexpr std::uint8_t kLethal = 254;
inline constexpr std::uint8_t kInscribed = 253;
inline constexpr std::uint8_t kFreeSpace = 0;

struct Footprint {
  Polygon polygon;
  double inscribed_radius = 0.0;
  double circumscribed_radius = 0.0;

  static Footprint from_polygon(Polygon poly);
  static Footprint from_params(const ParamSet& p) { return from_polygon(p.footprint); }
};

struct InflationParams {
  double inflation_radius = 1.75;
  double cost_scaling_factor = 2.58;
  double inscribed_radius = 0.1;

  static InflationParams from_params(const ParamSet& p) {
    return {p.inflation_radius, p.cost_scaling_factor, p.inscribed_radius()};
  }
};

// Cost of a free cell at distance d (m) from the nearest lethal cell:
// 253 within the inscribed radius, exponential decay up to the inflation
// radius, 0 beyond.
std::uint8_t inflation_cost(double d, const InflationParams& p);

// The decay branch alone, round(252 * exp(-k (d - r_ins))).
std::uint8_t decay_cost(double d, const InflationParams& p);

// Raises every cell to at least its inflation cost. Distances come from an
// exact Euclidean distance transform over the lethal cells; cells farther
// than the inflation radius are left untouched.
void inflate(Costmap& map, const InflationParams& p);
void inflate_serial(Costmap& map, const InflationParams& p);

// Lethal where the map is occupied, then inflated. Unknown counts as free.
Costmap build_costmap(const TriStateMap& map, const InflationParams& p);

// Rolling window of width x height metres centred on the robot, on the
// map's cell lattice. Obstacles outside the window still inflate into it.
Costmap build_local_costmap(const TriStateMap& map, const Pose2D& robot, double width, double height,
                            const InflationParams& p);

}  // namespace eddie::nav

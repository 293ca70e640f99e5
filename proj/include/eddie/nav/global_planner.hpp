#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "eddie/core/types.hpp"
#include "eddie/nav/costmap.hpp"

namespace eddie::nav {

struct Plan {
  std::vector<Pose2D> poses;
  double cost = 0.0;

  bool empty() const { return poses.empty(); }
  double length() const;
};

class PlanError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Edge weight for entering a cell of cost c over a step of `step` metres.
inline double edge_cost(double step, std::uint8_t c) { return step * (1.0 + c / 256.0); }

// 8-connected A* over cell centres with the octile heuristic. Cells of cost
// >= 253 cannot be entered, except that a start inside the inscribed band
// may leave it through 253 cells. The last pose carries the goal heading.
// Throws PlanError("goal in collision"), PlanError("unreachable"), or for a
// start/goal off the map or a lethal start.
Plan plan_global(const Costmap& map, const Pose2D& start, const Pose2D& goal);

}  // namespace eddie::nav

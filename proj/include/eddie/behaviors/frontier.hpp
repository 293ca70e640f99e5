#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "eddie/core/grid.hpp"
#include "eddie/core/params.hpp"
#include "eddie/nav/costmap.hpp"
#include "eddie/nav/local_planner.hpp"

namespace eddie::behaviors {

inline constexpr std::size_t kMinFrontierSize = 8;

struct Frontier {
  std::vector<CellIndex> cells;  // ascending grid index order
  Pose2D centroid;               // mean of cell centres
  std::size_t size = 0;
};

// True for a free cell with at least one unknown 8-neighbour. Cells on the
// grid edge do not see outside the grid.
bool is_frontier_cell(const TriStateMap& map, CellIndex c);

// 8-connected components of frontier cells, smaller ones dropped. Ordered by
// the lowest cell index in each component.
std::vector<Frontier> find_frontiers(const TriStateMap& map, std::size_t min_size = kMinFrontierSize);

struct GoalSelection {
  const nav::Costmap* costmap = nullptr;  // when set, goals land on cells of cost <= max_cost
  std::uint8_t max_cost = nav::kInscribed - 1;
  const TriStateMap* map = nullptr;       // when set, goals land on known free cells
  // With a costmap, stand this far back from the frontier (searching up to
  // 0.5 m further) instead of on it: away from the unknown cells around it
  // when a map is given, else toward the robot. 0 disables.
  double view_distance = 0.0;
  std::vector<Point2> blacklist;          // tried goals; bans frontiers whose anchor or goal is near one
  double blacklist_radius = 0.5;          // m
};

// Frontier minimising euclidean distance / size. Its anchor is the centroid,
// or with a costmap the frontier cell nearest the centroid (usable, unless a
// viewpoint is wanted). The goal is the anchor, or a viewpoint in front of
// it, facing the unexplored side.
std::optional<nav::NavGoal> select_exploration_goal(const std::vector<Frontier>& frontiers, const Pose2D& robot,
                                                    const ParamSet& params, const GoalSelection& sel = {});

}  // namespace eddie::behaviors

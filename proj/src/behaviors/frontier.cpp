#include "eddie/behaviors/frontier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace eddie::behaviors {

bool is_frontier_cell(const TriStateMap& map, CellIndex c) {
  if (map.at(c) != CellState::kFree) return false;
  for (int dy = -1; dy <= 1; ++dy)
    for (int dx = -1; dx <= 1; ++dx) {
      const CellIndex n{c.x + dx, c.y + dy};
      if ((dx || dy) && map.contains(n) && map.at(n) == CellState::kUnknown) return true;
    }
  return false;
}

std::vector<Frontier> find_frontiers(const TriStateMap& map, std::size_t min_size) {
  const GridGeometry& g = map.geometry;
  std::vector<char> mark(g.size(), 0);  // 1 frontier, 2 visited
  for (std::size_t i = 0; i < g.size(); ++i)
    if (is_frontier_cell(map, g.cell_of(i))) mark[i] = 1;

  std::vector<Frontier> out;
  std::vector<std::size_t> stack;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (mark[i] != 1) continue;
    Frontier f;
    mark[i] = 2;
    stack.push_back(i);
    while (!stack.empty()) {
      const CellIndex c = g.cell_of(stack.back());
      stack.pop_back();
      f.cells.push_back(c);
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          const CellIndex n{c.x + dx, c.y + dy};
          if (!g.contains(n) || mark[g.index(n)] != 1) continue;
          mark[g.index(n)] = 2;
          stack.push_back(g.index(n));
        }
    }
    if (f.cells.size() < min_size) continue;
    std::sort(f.cells.begin(), f.cells.end(), [&](CellIndex a, CellIndex b) { return g.index(a) < g.index(b); });
    double sx = 0, sy = 0;
    for (const auto& c : f.cells) {
      sx += g.cell_center_x(c.x);
      sy += g.cell_center_y(c.y);
    }
    f.size = f.cells.size();
    f.centroid = Pose2D(sx / f.size, sy / f.size, 0.0);
    out.push_back(std::move(f));
  }
  return out;
}

namespace {

bool usable(const GoalSelection& sel, double x, double y) {
  const GridGeometry& g = sel.costmap->geometry;
  const CellIndex k = g.world_to_cell(x, y);
  if (!g.contains(k) || sel.costmap->at(k) > sel.max_cost) return false;
  if (sel.map) {
    const CellIndex m = sel.map->geometry.world_to_cell(x, y);
    if (!sel.map->contains(m) || sel.map->at(m) != CellState::kFree) return false;
  }
  return true;
}

}  // namespace

std::optional<nav::NavGoal> select_exploration_goal(const std::vector<Frontier>& frontiers, const Pose2D& robot,
                                                    const ParamSet& params, const GoalSelection& sel) {
  std::optional<nav::NavGoal> best;
  double best_score = std::numeric_limits<double>::infinity();
  for (const auto& f : frontiers) {
    Point2 anchor{f.centroid.x, f.centroid.y};
    if (sel.costmap) {
      const GridGeometry& g = sel.costmap->geometry;
      double nearest = std::numeric_limits<double>::infinity();
      bool found = false;
      for (const auto& c : f.cells) {
        const double cx = g.cell_center_x(c.x), cy = g.cell_center_y(c.y);
        const CellIndex k = g.world_to_cell(cx, cy);
        // A viewpoint goal only needs the viewpoint itself to be usable.
        if (sel.view_distance <= 0.0 && (!g.contains(k) || sel.costmap->at(k) > sel.max_cost)) continue;
        const double d = std::hypot(cx - f.centroid.x, cy - f.centroid.y);
        if (d < nearest) {
          nearest = d;
          anchor = {cx, cy};
          found = true;
        }
      }
      if (!found) continue;
    }
    Point2 target = anchor;
    double yaw = 0.0;
    const double cx = f.centroid.x - anchor.x, cy = f.centroid.y - anchor.y;
    if (sel.costmap && sel.view_distance > 0.0) {
      // Stand back from the unknown side so the frontier lies beyond the
      // sensor's minimum range and off any shadow ray through it.
      double ux = 0.0, uy = 0.0;
      if (sel.map) {
        const GridGeometry& mg = sel.map->geometry;
        const CellIndex a = mg.world_to_cell(anchor.x, anchor.y);
        for (int dy = -3; dy <= 3; ++dy)
          for (int dx = -3; dx <= 3; ++dx) {
            const CellIndex q{a.x + dx, a.y + dy};
            if (sel.map->contains(q) && sel.map->at(q) == CellState::kUnknown) {
              ux -= dx;
              uy -= dy;
            }
          }
      }
      if (std::hypot(ux, uy) < 1e-6) {
        ux = robot.x - anchor.x;
        uy = robot.y - anchor.y;
      }
      const double n = std::hypot(ux, uy);
      if (n > 1e-6) {
        ux /= n;
        uy /= n;
      } else {
        ux = -std::cos(robot.theta);
        uy = -std::sin(robot.theta);
      }
      bool found = false;
      for (int k = 0; k <= 10 && !found; ++k) {
        const double off = sel.view_distance + 0.05 * k;
        if (usable(sel, anchor.x + off * ux, anchor.y + off * uy)) {
          target = {anchor.x + off * ux, anchor.y + off * uy};
          found = true;
        }
      }
      if (!found) continue;
      yaw = std::atan2(-uy, -ux);
    } else {
      // Face into the unexplored side: toward the centroid when the goal was
      // moved off it, else along the approach direction.
      yaw = std::hypot(cx, cy) > 1e-6 ? std::atan2(cy, cx) : std::atan2(anchor.y - robot.y, anchor.x - robot.x);
    }
    bool banned = false;
    for (const auto& b : sel.blacklist)
      if (std::hypot(b.x - anchor.x, b.y - anchor.y) <= sel.blacklist_radius ||
          std::hypot(b.x - target.x, b.y - target.y) <= sel.blacklist_radius)
        banned = true;
    if (banned) continue;
    const double score = std::hypot(target.x - robot.x, target.y - robot.y) / static_cast<double>(f.size);
    if (score < best_score) {
      best_score = score;
      best = nav::NavGoal::at(Pose2D(target.x, target.y, yaw), params);
    }
  }
  return best;
}

}  // namespace eddie::behaviors

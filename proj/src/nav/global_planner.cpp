#include "eddie/nav/global_planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace eddie::nav {

double Plan::length() const {
  double total = 0.0;
  for (std::size_t i = 1; i < poses.size(); ++i) total += distance(poses[i - 1], poses[i]);
  return total;
}

Plan plan_global(const Costmap& map, const Pose2D& start, const Pose2D& goal) {
  const GridGeometry& g = map.geometry;
  const CellIndex s = g.world_to_cell(start.x, start.y);
  const CellIndex t = g.world_to_cell(goal.x, goal.y);
  if (!g.contains(s)) throw PlanError("start outside map");
  if (!g.contains(t)) throw PlanError("goal outside map");
  if (map.at(s) >= kLethal) throw PlanError("start in collision");
  if (map.at(t) >= kInscribed) throw PlanError("goal in collision");

  const double res = g.resolution;
  const double diag = res * std::sqrt(2.0);
  auto heuristic = [&](CellIndex c) {
    const int dx = std::abs(c.x - t.x);
    const int dy = std::abs(c.y - t.y);
    return res * std::max(dx, dy) + (diag - res) * std::min(dx, dy);
  };

  const std::size_t n = g.size();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> cost(n, inf);
  std::vector<std::int64_t> parent(n, -1);
  std::vector<char> closed(n, 0);

  struct Entry {
    double f;
    double g;
    std::size_t idx;
    // Min-heap on f; ties prefer deeper nodes, then lower index.
    bool operator>(const Entry& o) const {
      if (f != o.f) return f > o.f;
      if (g != o.g) return g < o.g;
      return idx > o.idx;
    }
  };
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  const std::size_t si = g.index(s);
  const std::size_t ti = g.index(t);
  cost[si] = 0.0;
  open.push({heuristic(s), 0.0, si});

  static constexpr int kDx[8] = {1, -1, 0, 0, 1, 1, -1, -1};
  static constexpr int kDy[8] = {0, 0, 1, -1, 1, -1, 1, -1};
  while (!open.empty()) {
    const Entry e = open.top();
    open.pop();
    if (closed[e.idx]) continue;
    closed[e.idx] = 1;
    if (e.idx == ti) break;
    const CellIndex c = g.cell_of(e.idx);
    const bool in_band = map.data[e.idx] >= kInscribed;
    for (int k = 0; k < 8; ++k) {
      const CellIndex nb{c.x + kDx[k], c.y + kDy[k]};
      if (!g.contains(nb)) continue;
      const std::size_t ni = g.index(nb);
      const std::uint8_t nc = map.data[ni];
      if (nc >= kLethal) continue;
      if (nc == kInscribed && !in_band) continue;
      const double ng = cost[e.idx] + edge_cost(k < 4 ? res : diag, nc);
      if (ng < cost[ni]) {
        cost[ni] = ng;
        parent[ni] = static_cast<std::int64_t>(e.idx);
        open.push({ng + heuristic(nb), ng, ni});
      }
    }
  }
  if (!closed[ti]) throw PlanError("unreachable");

  Plan plan;
  plan.cost = cost[ti];
  std::vector<std::size_t> cells;
  for (std::int64_t i = static_cast<std::int64_t>(ti); i != -1; i = parent[static_cast<std::size_t>(i)])
    cells.push_back(static_cast<std::size_t>(i));
  std::reverse(cells.begin(), cells.end());
  plan.poses.reserve(cells.size());
  for (std::size_t k = 0; k < cells.size(); ++k) {
    const CellIndex c = g.cell_of(cells[k]);
    double heading = goal.theta;
    if (k + 1 < cells.size()) {
      const CellIndex d = g.cell_of(cells[k + 1]);
      heading = std::atan2(d.y - c.y, d.x - c.x);
    }
    plan.poses.emplace_back(g.cell_center_x(c.x), g.cell_center_y(c.y), heading);
  }
  return plan;
}

}  // namespace eddie::nav

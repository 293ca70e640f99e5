#pragma once

// Reference implementations written out independently of the library, shared
// by the unit tests and the acceptance run.

#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <set>
#include <utility>
#include <vector>

#include "eddie/behaviors/behavior.hpp"
#include "eddie/core/grid.hpp"
#include "eddie/core/params.hpp"
#include "eddie/core/types.hpp"
#include "eddie/nav/costmap.hpp"

namespace eddie::oracle {

// Forward integration of a differential drive with many midpoint-heading
// substeps.
inline Pose2D euler(Pose2D p, double vl, double vr, double dt, double track, int steps) {
  const double v = (vl + vr) / 2, w = (vr - vl) / track, h = dt / steps;
  double x = p.x, y = p.y, th = p.theta;
  for (int i = 0; i < steps; ++i) {
    const double mid = th + w * h / 2;
    x += v * std::cos(mid) * h;
    y += v * std::sin(mid) * h;
    th += w * h;
  }
  return Pose2D(x, y, th);
}

// Inflation cost at distance d from the nearest lethal cell, default radii.
inline std::uint8_t ref_cost(double d) {
  if (d <= 0.1 + 1e-9) return 253;
  if (d <= 1.75 + 1e-9) return static_cast<std::uint8_t>(std::lround(252.0 * std::exp(-2.58 * (d - 0.1))));
  return 0;
}

// Euclidean distance (m) from every cell to the nearest lethal cell, by brute
// force. Infinity when the map has no lethal cell.
inline std::vector<double> lethal_distance(const nav::Costmap& m) {
  const auto& g = m.geometry;
  std::vector<CellIndex> lethal;
  for (std::size_t i = 0; i < m.data.size(); ++i)
    if (m.data[i] == nav::kLethal) lethal.push_back(g.cell_of(i));
  std::vector<double> out(m.data.size(), std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < m.data.size(); ++i) {
    const CellIndex c = g.cell_of(i);
    for (const auto& l : lethal) out[i] = std::min(out[i], std::hypot(c.x - l.x, c.y - l.y) * g.resolution);
  }
  return out;
}

inline nav::Costmap brute_inflate(const nav::Costmap& in) {
  nav::Costmap out = in;
  const auto d = lethal_distance(in);
  for (std::size_t i = 0; i < in.data.size(); ++i)
    if (in.data[i] != nav::kLethal && std::isfinite(d[i])) out.data[i] = std::max(out.data[i], ref_cost(d[i]));
  return out;
}

// Plain Dijkstra over 8-connected cells with the planner's entry rules:
// >= 254 never, 253 only from inside the 253 band.
inline double dijkstra(const nav::Costmap& m, CellIndex s, CellIndex t) {
  const auto& g = m.geometry;
  std::vector<double> dist(g.size(), std::numeric_limits<double>::infinity());
  std::set<std::pair<double, std::size_t>> q;
  dist[g.index(s)] = 0;
  q.insert({0.0, g.index(s)});
  while (!q.empty()) {
    auto [d, i] = *q.begin();
    q.erase(q.begin());
    if (d > dist[i]) continue;
    const CellIndex c = g.cell_of(i);
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        if (!dx && !dy) continue;
        const CellIndex n{c.x + dx, c.y + dy};
        if (!g.contains(n)) continue;
        const auto nc = m.at(n);
        if (nc >= 254 || (nc == 253 && m.data[i] < 253)) continue;
        const double step = (dx && dy ? std::sqrt(2.0) : 1.0) * g.resolution;
        const double nd = d + step * (1.0 + nc / 256.0);
        if (nd < dist[g.index(n)]) {
          q.erase({dist[g.index(n)], g.index(n)});
          dist[g.index(n)] = nd;
          q.insert({nd, g.index(n)});
        }
      }
  }
  return dist[g.index(t)];
}

// Cells 4-connected to `start` through free cells.
inline std::vector<CellIndex> reachable_free(const TriStateMap& m, CellIndex start) {
  const auto& g = m.geometry;
  std::vector<char> seen(g.size(), 0);
  std::vector<CellIndex> out;
  std::deque<CellIndex> q{start};
  seen[g.index(start)] = 1;
  while (!q.empty()) {
    const CellIndex c = q.front();
    q.pop_front();
    out.push_back(c);
    for (const CellIndex n : {CellIndex{c.x + 1, c.y}, CellIndex{c.x - 1, c.y}, CellIndex{c.x, c.y + 1},
                              CellIndex{c.x, c.y - 1}}) {
      if (!g.contains(n) || seen[g.index(n)] || m.at(n) != CellState::kFree) continue;
      seen[g.index(n)] = 1;
      q.push_back(n);
    }
  }
  return out;
}

// Commands outside the velocity envelope or the per-period acceleration
// limits. A forward speed below min_vel_x is allowed only while ramping.
// Escape commands are exempt from the acceleration check.
template <typename Record>
int envelope_violations(const std::vector<Record>& cmds, const ParamSet& p) {
  const double dv = p.acc_lim_x / p.controller_frequency + 1e-9;
  const double dw = p.acc_lim_theta / p.controller_frequency + 1e-9;
  int bad = 0;
  Twist prev;
  for (const auto& c : cmds) {
    const double v = std::abs(c.cmd.linear);
    const bool ramp = v > 0 && v < p.min_vel_x - 1e-9 && std::abs(c.cmd.linear - prev.linear) > 1e-12;
    if (v > p.max_vel_x + 1e-9 || (v > 0 && v < p.min_vel_x - 1e-9 && !ramp)) ++bad;
    if (std::abs(c.cmd.angular) > p.max_vel_theta + 1e-9) ++bad;
    if (!c.recovering && (std::abs(c.cmd.linear - prev.linear) > dv || std::abs(c.cmd.angular - prev.angular) > dw))
      ++bad;
    prev = c.cmd;
  }
  return bad;
}

// Behavior transition table.
enum class Sight { kNone, kFresh, kVisited };

struct Expect {
  behaviors::Mode mode;
  std::vector<behaviors::ActionKind> actions;
};

inline Expect declared(behaviors::Mode m, Sight s, behaviors::NavOutcome nav, bool goal, bool done) {
  using A = behaviors::ActionKind;
  using M = behaviors::Mode;
  using N = behaviors::NavOutcome;
  auto explore = [&]() { return goal ? Expect{M::kExploring, {A::kSendGoal}} : Expect{M::kIdle, {A::kStop}}; };
  switch (m) {
    case M::kExploring:
      if (s == Sight::kFresh) return {M::kApproaching, {A::kSendGoal}};
      if (nav == N::kActive) return {M::kExploring, {}};
      return explore();
    case M::kApproaching:
      if (nav == N::kSucceeded) return {M::kCapturing, {A::kCapture}};
      if (nav == N::kActive) return {M::kApproaching, {}};
      return {M::kExploring, {}};
    case M::kCapturing:
      return done ? Expect{M::kResuming, {A::kRotate}} : Expect{M::kCapturing, {}};
    case M::kResuming:
      if (s == Sight::kFresh) return {M::kApproaching, {A::kSendGoal}};
      return done ? explore() : Expect{M::kResuming, {}};
    case M::kIdle:
      return {M::kIdle, {}};
  }
  return {M::kIdle, {}};
}

// The situation behind one enumerated (state, input) pair.
struct BehaviorCase {
  behaviors::BehaviorState state;
  behaviors::BehaviorInput input;
};

inline BehaviorCase behavior_case(behaviors::Mode m, Sight s, behaviors::NavOutcome nav, bool goal, bool done,
                                  const ParamSet& p) {
  BehaviorCase c;
  c.state.mode = m;
  c.state.visited["bob"] = 50.0;
  if (m == behaviors::Mode::kApproaching || m == behaviors::Mode::kCapturing) {
    c.state.person = "carol";
    c.state.target = nav::NavGoal::at(Pose2D(1, 1, 0), p);
  }
  c.input.now = 100.0;
  c.input.robot = Pose2D(0.5, 0.5, 0.0);
  if (s == Sight::kFresh) c.input.detections = {{"alice", {2.0, 0.0}}};
  if (s == Sight::kVisited) c.input.detections = {{"bob", {2.0, 0.0}}};
  c.input.nav = nav;
  if (goal) c.input.exploration_goal = nav::NavGoal::at(Pose2D(3, 1, 0), p);
  c.input.action_done = done;
  return c;
}

inline constexpr behaviors::Mode kModes[] = {behaviors::Mode::kExploring, behaviors::Mode::kApproaching,
                                             behaviors::Mode::kCapturing, behaviors::Mode::kResuming,
                                             behaviors::Mode::kIdle};
inline constexpr Sight kSights[] = {Sight::kNone, Sight::kFresh, Sight::kVisited};
inline constexpr behaviors::NavOutcome kOutcomes[] = {behaviors::NavOutcome::kIdle, behaviors::NavOutcome::kActive,
                                                      behaviors::NavOutcome::kSucceeded,
                                                      behaviors::NavOutcome::kAborted};

}  // namespace eddie::oracle

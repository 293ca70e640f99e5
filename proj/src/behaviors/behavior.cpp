#include "eddie/behaviors/behavior.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <fstream>

#include "json.hpp"

namespace eddie::behaviors {

std::optional<Twist> keys_to_twist(char key, const ParamSet& p) {
  switch (key) {
    case 'w': return Twist{p.max_vel_x, 0.0};
    case 'x': return Twist{-p.max_vel_x, 0.0};
    case 'a': return Twist{0.0, p.min_in_place_vel_theta};
    case 'd': return Twist{0.0, -p.min_in_place_vel_theta};
    case 's': return Twist{0.0, 0.0};
    default: return std::nullopt;
  }
}

Point2 detection_to_odom(Point2 detection, const Pose2D& robot, const TransformTree& tree) {
  TransformTree t = tree;
  t.set(Transform::from_pose(kOdomFrame, kBaseFrame, robot));
  const Pose2D p = apply(t.lookup(kOdomFrame, kCameraFrame), Pose2D(detection.x, detection.y, 0.0));
  return {p.x, p.y};
}

nav::NavGoal face_to_goal(Point2 detection, const Pose2D& robot, const TransformTree& tree, double standoff,
                          const ParamSet& params) {
  const Point2 person = detection_to_odom(detection, robot, tree);
  const double dx = person.x - robot.x, dy = person.y - robot.y;
  const double range = std::hypot(dx, dy);
  const double yaw = std::atan2(dy, dx);
  if (range <= standoff) return nav::NavGoal::at(Pose2D(robot.x, robot.y, yaw), params);
  const double k = (range - standoff) / range;
  return nav::NavGoal::at(Pose2D(robot.x + k * dx, robot.y + k * dy, yaw), params);
}

InPlaceTurn::InPlaceTurn(double angle, const ParamSet& p)
    : remaining_(angle), dt_(1.0 / p.controller_frequency), acc_(p.acc_lim_theta), max_rate_(p.min_in_place_vel_theta) {
  done_ = std::abs(angle) < 1e-9;
}

Twist InPlaceTurn::next(const Twist& prev) {
  if (done_) return {};
  const double dw = acc_ * dt_;
  const double rem = std::abs(remaining_);
  // Largest rate whose braking sequence w, w - dw, ... covers exactly rem.
  const double n = std::floor((-1.0 + std::sqrt(1.0 + 8.0 * rem / (dt_ * dw))) / 2.0);
  const double extra = rem - dt_ * dw * n * (n + 1.0) / 2.0;
  double target = n * dw + std::min(dw, extra / (dt_ * (n + 1.0)));
  target = std::min(target, max_rate_);
  const double dir = remaining_ > 0 ? 1.0 : -1.0;
  const double w = std::clamp(dir * target, prev.angular - dw, prev.angular + dw);
  remaining_ -= w * dt_;
  if (remaining_ * dir <= 1e-9) done_ = true;
  return {0.0, w};
}

const char* to_string(Mode m) {
  switch (m) {
    case Mode::kExploring: return "EXPLORING";
    case Mode::kApproaching: return "APPROACHING";
    case Mode::kCapturing: return "CAPTURING";
    case Mode::kResuming: return "RESUMING";
    case Mode::kIdle: return "IDLE";
  }
  return "?";
}

const char* to_string(ActionKind a) {
  switch (a) {
    case ActionKind::kSendGoal: return "send_goal";
    case ActionKind::kCapture: return "capture";
    case ActionKind::kRotate: return "rotate";
    case ActionKind::kStop: return "stop";
  }
  return "?";
}

bool approachable(const BehaviorState& s, const std::string& id, double now, const BehaviorConfig& cfg) {
  for (const auto* m : {&s.visited, &s.attempted}) {
    auto it = m->find(id);
    if (it != m->end() && now - it->second < cfg.cooldown) return false;
  }
  return true;
}

namespace {

// Nearest approachable detection, ties broken by id.
const Detection* pick_person(const BehaviorState& s, const BehaviorInput& in, const BehaviorConfig& cfg) {
  const Detection* best = nullptr;
  for (const auto& d : in.detections) {
    if (!approachable(s, d.person_id, in.now, cfg)) continue;
    const double r = std::hypot(d.camera.x, d.camera.y);
    if (!best) {
      best = &d;
      continue;
    }
    const double rb = std::hypot(best->camera.x, best->camera.y);
    if (r < rb || (r == rb && d.person_id < best->person_id)) best = &d;
  }
  return best;
}

void explore_or_idle(BehaviorStep& out, const BehaviorInput& in) {
  if (in.exploration_goal) {
    out.state.mode = Mode::kExploring;
    out.state.target = in.exploration_goal;
    out.actions.push_back({ActionKind::kSendGoal, in.exploration_goal, {}});
  } else {
    out.state.mode = Mode::kIdle;
    out.state.target.reset();
    out.actions.push_back({ActionKind::kStop, std::nullopt, {}});
  }
}

}  // namespace

BehaviorStep behavior_step(const BehaviorState& state, const BehaviorInput& in, const TransformTree& tree,
                           const BehaviorConfig& cfg, const ParamSet& params) {
  BehaviorStep out{state, {}};
  BehaviorState& s = out.state;

  auto approach = [&](const Detection& d) {
    const nav::NavGoal goal = face_to_goal(d.camera, in.robot, tree, cfg.standoff, params);
    s.mode = Mode::kApproaching;
    s.target = goal;
    s.person = d.person_id;
    s.person_position = detection_to_odom(d.camera, in.robot, tree);
    out.actions.push_back({ActionKind::kSendGoal, goal, d.person_id});
  };

  switch (state.mode) {
    case Mode::kExploring:
      if (const Detection* d = pick_person(state, in, cfg)) {
        approach(*d);
      } else if (in.nav != NavOutcome::kActive) {
        explore_or_idle(out, in);
      }
      break;
    case Mode::kApproaching:
      if (in.nav == NavOutcome::kSucceeded) {
        s.mode = Mode::kCapturing;
        out.actions.push_back({ActionKind::kCapture, std::nullopt, state.person.value_or("")});
      } else if (in.nav == NavOutcome::kAborted || in.nav == NavOutcome::kIdle) {
        if (state.person) s.attempted[*state.person] = in.now;
        s.mode = Mode::kExploring;
        s.target.reset();
        s.person.reset();
      }
      break;
    case Mode::kCapturing:
      if (in.action_done) {
        if (state.person) s.visited[*state.person] = in.now;
        s.mode = Mode::kResuming;
        s.target.reset();
        s.person.reset();
        out.actions.push_back({ActionKind::kRotate, std::nullopt, {}});
      }
      break;
    case Mode::kResuming:
      if (const Detection* d = pick_person(state, in, cfg)) {
        approach(*d);
      } else if (in.action_done) {
        explore_or_idle(out, in);
      }
      break;
    case Mode::kIdle:
      break;
  }
  return out;
}

namespace {

void write_pgm(const TriStateMap& map, const Pose2D& centre, double half, const std::filesystem::path& path) {
  const GridGeometry& g = map.geometry;
  const int n = static_cast<int>(std::lround(2.0 * half / g.resolution));
  const CellIndex c = g.world_to_cell(centre.x, centre.y);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << "P5\n" << n << ' ' << n << "\n255\n";
  for (int r = n - 1; r >= 0; --r)
    for (int k = 0; k < n; ++k) {
      const CellIndex q{c.x - n / 2 + k, c.y - n / 2 + r};
      unsigned char v = 205;
      if (g.contains(q)) v = map.at(q) == CellState::kOccupied ? 0 : map.at(q) == CellState::kFree ? 254 : 205;
      out.put(static_cast<char>(v));
    }
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace

PhotoRecord capture_photo(const TriStateMap& map, const std::string& person_id, const Pose2D& robot,
                          Point2 person_position, double stamp, int sequence, const std::filesystem::path& dir) {
  PhotoRecord rec{person_id, robot, person_position, stamp, sequence, {}, {}, false, {}};
  const std::string stem = "photo_" + std::to_string(sequence);
  rec.snapshot = dir / (stem + ".pgm");
  rec.record = dir / (stem + ".json");
  try {
    std::filesystem::create_directories(dir);
    write_pgm(map, robot, 1.5, rec.snapshot);
    nlohmann::json j = {{"person_id", person_id},
                        {"robot_pose", {{"x", robot.x}, {"y", robot.y}, {"theta", robot.theta}}},
                        {"person", {{"x", person_position.x}, {"y", person_position.y}}},
                        {"distance", std::hypot(person_position.x - robot.x, person_position.y - robot.y)},
                        {"stamp", stamp},
                        {"sequence", sequence},
                        {"snapshot", rec.snapshot.filename().string()}};
    std::ofstream out(rec.record);
    if (!out) throw std::runtime_error("cannot open " + rec.record.string());
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("write failed for " + rec.record.string());
    rec.saved = true;
  } catch (const std::exception& e) {
    rec.error = e.what();
    spdlog::error("photo {} not saved: {}", sequence, e.what());
  }
  return rec;
}

}  // namespace eddie::behaviors

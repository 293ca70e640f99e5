#include "eddie/system/robot_system.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>

#include "eddie/drive/motor.hpp"

namespace eddie::system {

const char* to_string(ControlMode m) {
  switch (m) {
    case ControlMode::kIdle: return "idle";
    case ControlMode::kTeleop: return "teleop";
    case ControlMode::kNavigate: return "navigate";
    case ControlMode::kExplore: return "explore";
  }
  return "?";
}

namespace {

sim::SimConfig make_sim_config(const SystemConfig& c) {
  sim::SimConfig s = sim::SimConfig::from_params(c.params);
  s.seed = c.seed;
  s.face.false_positive_rate = c.face_false_positive_rate;
  return s;
}

}  // namespace

RobotSystem::RobotSystem(sim::Scenario scenario, SystemConfig config)
    : config_(std::move(config)),
      sim_(scenario, make_sim_config(config_)),
      tree_(TransformTree::robot_default()),
      odom_(odometry::DriveGeometry::from_params(config_.params), scenario.robot_start, 0.0),
      mapper_(config_.mapper),
      nav_(config_.params),
      static_map_(sim::rasterize(scenario.world, config_.params.resolution)) {
  bus_.advertise<Twist>(kCmdVelTopic);
  bus_.advertise<LaserScan>(kScanTopic);
  bus_.advertise<TriStateMap>(kMapTopic);
  bus_.advertise<nav::Plan>(kPlanTopic);
  bus_.advertise<nav::NavStatus>(kNavStatusTopic);
  bus_.advertise<Pose2D>(kGoalTopic);
  bus_.advertise<Pose2D>(kPoseTopic);
  bus_.advertise<std::string>(behaviors::kKeysTopic);
  bus_.advertise<std::vector<behaviors::Detection>>(behaviors::kDetectionsTopic);
  bus_.advertise<behaviors::PhotoRecord>(behaviors::kPhotoEventTopic);
  odom_pub_.emplace(bus_);
  goal_in_ = bus_.subscribe<Pose2D>(kGoalTopic);
  keys_in_ = bus_.subscribe<std::string>(behaviors::kKeysTopic);
}

Pose2D RobotSystem::pose_estimate() const {
  return config_.ground_truth_localization ? sim_.ground_truth() : odom_.state().pose;
}

const TriStateMap& RobotSystem::planning_map() {
  if (config_.static_map) return static_map_;
  planning_cache_ = mapper_.tristate();
  // Unmapped space around the robot and the goal plans as unknown rather
  // than off the map.
  const Pose2D r = pose_estimate();
  Point2 lo{r.x, r.y}, hi{r.x, r.y};
  if (const auto& g = nav_.goal()) {
    lo = {std::min(lo.x, g->target.x), std::min(lo.y, g->target.y)};
    hi = {std::max(hi.x, g->target.x), std::max(hi.y, g->target.y)};
  }
  const auto& geom = planning_cache_.geometry;
  const double margin = config_.params.inflation_radius + config_.params.resolution;
  if (geom.size() == 0 || lo.x - margin < geom.origin.x || lo.y - margin < geom.origin.y ||
      hi.x + margin > geom.max_x() || hi.y + margin > geom.max_y())
    planning_cache_ = mapping::regrid(planning_cache_, mapping::grow_to_cover(geom, lo, hi, margin), CellState::kUnknown);
  return planning_cache_;
}

void RobotSystem::set_goal(const Pose2D& goal) {
  mode_ = ControlMode::kNavigate;
  turn_.reset();
  nav_.set_goal(goal, time());
}

void RobotSystem::start_exploration() {
  nav_.cancel(time());
  mode_ = ControlMode::kExplore;
  behavior_ = {};
  // Look around once before picking the first frontier.
  behavior_.mode = behaviors::Mode::kResuming;
  turn_.emplace(kTwoPi, config_.params);
  exploring_goal_.reset();
  blacklist_.clear();
}

void RobotSystem::key(char k) {
  const auto t = behaviors::keys_to_twist(k, config_.params);
  if (!t) return;
  if (mode_ != ControlMode::kTeleop) {
    nav_.cancel(time());
    turn_.reset();
    mode_ = ControlMode::kTeleop;
  }
  teleop_ = *t;
}

void RobotSystem::stop() {
  nav_.cancel(time());
  turn_.reset();
  mode_ = ControlMode::kIdle;
  teleop_ = {};
}

void RobotSystem::drain_inputs() {
  for (const auto& g : goal_in_.drain()) set_goal(g);
  for (const auto& s : keys_in_.drain())
    for (char c : s) key(c);
}

Twist RobotSystem::navigate(double now, const Pose2D& pose) {
  if (!nav_.active()) return {};
  nav_.seed_command(last_cmd_);
  return nav_.update(now, pose, planning_map());
}

Twist RobotSystem::explore_step(double now, const Pose2D& pose) {
  using behaviors::Mode;
  using behaviors::NavOutcome;
  if (scans_ == 0) return {};

  std::vector<behaviors::Detection> dets;
  for (const auto& f : sim_.detect_faces()) {
    dets.push_back({f.person_id, {f.x, f.y}});
    detections_.push_back({now, f.person_id, {f.x, f.y}, sim_.ground_truth(), f.false_positive});
  }
  if (!dets.empty()) bus_.publish(behaviors::kDetectionsTopic, dets);

  NavOutcome outcome = NavOutcome::kIdle;
  if (nav_.active()) {
    outcome = NavOutcome::kActive;
  } else if (nav_.state() == nav::NavState::kSucceeded) {
    outcome = NavOutcome::kSucceeded;
  } else if (nav_.state() == nav::NavState::kAborted) {
    outcome = NavOutcome::kAborted;
  }
  // A frontier goal is tried once, whether it was reached or not.
  if (outcome != NavOutcome::kActive && exploring_goal_) {
    blacklist_.push_back({exploring_goal_->target.x, exploring_goal_->target.y});
    exploring_goal_.reset();
  }

  const bool done = (behavior_.mode == Mode::kCapturing && capture_done_) ||
                    (behavior_.mode == Mode::kResuming && turn_ && turn_->done());
  std::optional<nav::NavGoal> goal;
  if ((behavior_.mode == Mode::kExploring && outcome != NavOutcome::kActive) ||
      (behavior_.mode == Mode::kResuming && done)) {
    const TriStateMap map = live_map();
    const auto inflation = nav::InflationParams::from_params(config_.params);
    const nav::Costmap cm = nav::build_costmap(map, inflation);
    behaviors::GoalSelection sel;
    sel.costmap = &cm;
    // Room to turn in place on arrival.
    sel.max_cost = nav::decay_cost(config_.params.circumscribed_radius() + config_.params.resolution, inflation);
    sel.map = &map;
    sel.view_distance = config_.explore_view_distance;
    sel.blacklist = blacklist_;
    goal = behaviors::select_exploration_goal(behaviors::find_frontiers(map), pose, config_.params, sel);
  }

  behaviors::BehaviorInput in{now, pose, dets, outcome, goal, done};
  const auto step = behaviors::behavior_step(behavior_, in, tree_, config_.behavior, config_.params);
  behavior_ = step.state;
  if (behavior_.mode != Mode::kCapturing) capture_done_ = false;

  for (const auto& a : step.actions) {
    switch (a.kind) {
      case behaviors::ActionKind::kSendGoal:
        turn_.reset();
        nav_.set_goal(a.goal->target, now);
        exploring_goal_.reset();
        if (behavior_.mode == Mode::kExploring) exploring_goal_ = a.goal;
        break;
      case behaviors::ActionKind::kCapture: {
        auto rec = behaviors::capture_photo(live_map(), a.person_id, pose, behavior_.person_position, now,
                                            static_cast<int>(photos_.size()) + 1, config_.photo_dir);
        spdlog::info("photo {} of '{}' at t={:.2f}", rec.sequence, rec.person_id, now);
        bus_.publish(behaviors::kPhotoEventTopic, rec);
        photos_.push_back(std::move(rec));
        capture_done_ = true;
        break;
      }
      case behaviors::ActionKind::kRotate:
        turn_.emplace(kTwoPi, config_.params);
        break;
      case behaviors::ActionKind::kStop:
        nav_.cancel(now);
        turn_.reset();
        break;
    }
  }

  switch (behavior_.mode) {
    case Mode::kExploring:
    case Mode::kApproaching:
      return navigate(now, pose);
    case Mode::kResuming:
      return turn_ ? turn_->next(last_cmd_) : Twist{};
    case Mode::kCapturing:
    case Mode::kIdle:
      return {};
  }
  return {};
}

void RobotSystem::drive(const Twist& cmd) {
  const auto& p = config_.params;
  const drive::WheelSpeeds ws = drive::twist_to_wheel_speeds(cmd, p.track_width);
  const auto calib = drive::MotorCalibration::from_params(p);
  sim_.set_wheel_pulses(drive::velocity_to_pulse_width(ws.left, calib).offset_ms,
                        drive::velocity_to_pulse_width(ws.right, calib).offset_ms);
}

void RobotSystem::publish_status() {
  const auto& h = nav_.history();
  for (; nav_history_seen_ < h.size(); ++nav_history_seen_) bus_.publish(kNavStatusTopic, h[nav_history_seen_]);
}

void RobotSystem::tick() {
  const double now = time();
  drain_inputs();
  const Pose2D pose = pose_estimate();
  const std::size_t plan_version = nav_.plan_version();

  Twist cmd;
  switch (mode_) {
    case ControlMode::kIdle: break;
    case ControlMode::kTeleop: cmd = teleop_; break;
    case ControlMode::kNavigate: cmd = navigate(now, pose); break;
    case ControlMode::kExplore: cmd = explore_step(now, pose); break;
  }
  const bool recovering = nav_.state() == nav::NavState::kRecovering;
  drive(cmd);
  commands_.push_back({now, cmd, mode_, recovering});
  last_cmd_ = cmd;
  bus_.publish(kCmdVelTopic, cmd);
  if (nav_.plan_version() != plan_version) bus_.publish(kPlanTopic, nav_.plan());
  publish_status();

  const sim::StepResult r = sim_.step(period());
  for (const auto& e : r.encoder) odom_.add(e);
  odom_pub_->publish(odom_.sync(time()));
  if (r.scan) {
    mapper_.integrate(pose_estimate(), *r.scan);
    mapper_.clear(transform_polygon(config_.params.footprint, pose_estimate()));
    ++scans_;
    bus_.publish(kScanTopic, *r.scan);
  }
  bus_.publish(kPoseTopic, pose_estimate());
  if (time() + 1e-9 >= next_map_publish_) {
    bus_.publish(kMapTopic, mapper_.tristate());
    next_map_publish_ = time() + config_.map_publish_period;
  }
}

}  // namespace eddie::system

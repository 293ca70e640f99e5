#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "eddie/behaviors/behavior.hpp"
#include "eddie/behaviors/frontier.hpp"
#include "eddie/core/bus.hpp"
#include "eddie/core/params.hpp"
#include "eddie/core/transform.hpp"
#include "eddie/mapping/mapper.hpp"
#include "eddie/nav/navigator.hpp"
#include "eddie/odometry/odometry.hpp"
#include "eddie/sim/simulator.hpp"

namespace eddie::system {

inline constexpr const char* kCmdVelTopic = "/cmd_vel";
inline constexpr const char* kScanTopic = "/scan";
inline constexpr const char* kMapTopic = "/map";
inline constexpr const char* kPlanTopic = "/plan";
inline constexpr const char* kNavStatusTopic = "/nav_status";
inline constexpr const char* kGoalTopic = "/goal";
inline constexpr const char* kPoseTopic = "/pose";

enum class ControlMode { kIdle, kTeleop, kNavigate, kExplore };
const char* to_string(ControlMode m);

struct SystemConfig {
  ParamSet params;
  mapping::MapperConfig mapper;
  behaviors::BehaviorConfig behavior;
  std::uint64_t seed = 1;
  // Plan on the scenario's ground-truth map instead of the live map.
  bool static_map = false;
  // Localize with the simulator pose (a perfect map->odom correction);
  // otherwise the raw wheel odometry is used for mapping and control.
  bool ground_truth_localization = true;
  std::filesystem::path photo_dir = "photos";
  double map_publish_period = 1.0;  // s
  double face_false_positive_rate = 0.0;
  double explore_view_distance = 0.6;  // m, beyond the scanner's minimum range
};

struct CommandRecord {
  double stamp = 0.0;
  Twist cmd;
  ControlMode mode = ControlMode::kIdle;
  bool recovering = false;  // escape motion, exempt from acceleration limits
};

struct DetectionEvent {
  double stamp = 0.0;
  std::string person_id;
  Point2 camera;
  Pose2D robot;  // ground truth at detection
  bool false_positive = false;
};

// Whole robot on a simulated world, stepped at controller_frequency on the
// logical clock. Inputs arrive on "/goal" (Pose2D) and "/keys" (string);
// everything else is published on the bus.
class RobotSystem {
 public:
  RobotSystem(sim::Scenario scenario, SystemConfig config);

  void set_goal(const Pose2D& goal);
  void start_exploration();
  void key(char k);
  void stop();

  // One control period.
  void tick();
  // Ticks until `pred` holds or `budget` seconds of sim time elapse.
  template <typename Pred>
  bool run_until(Pred pred, double budget) {
    const double end = time() + budget;
    while (time() < end - 1e-9) {
      if (pred()) return true;
      tick();
    }
    return pred();
  }

  double time() const { return sim_.time(); }
  double period() const { return 1.0 / config_.params.controller_frequency; }
  ControlMode mode() const { return mode_; }
  TopicBus& bus() { return bus_; }
  const sim::Simulator& sim() const { return sim_; }
  const nav::Navigator& navigator() const { return nav_; }
  const behaviors::BehaviorState& behavior() const { return behavior_; }
  const mapping::Mapper& mapper() const { return mapper_; }
  TriStateMap live_map() const { return mapper_.tristate(); }
  const TriStateMap& planning_map();
  Pose2D pose_estimate() const;
  const odometry::OdometryState& odometry() const { return odom_.state(); }
  const std::vector<CommandRecord>& commands() const { return commands_; }
  const std::vector<DetectionEvent>& detections() const { return detections_; }
  const std::vector<behaviors::PhotoRecord>& photos() const { return photos_; }
  bool collided() const { return sim_.ever_collided(); }
  std::size_t scans_integrated() const { return scans_; }
  const SystemConfig& config() const { return config_; }
  // Frontiers on the live map, as the explorer sees them.
  std::vector<behaviors::Frontier> frontiers() const { return behaviors::find_frontiers(live_map()); }

 private:
  void drain_inputs();
  Twist explore_step(double now, const Pose2D& pose);
  Twist navigate(double now, const Pose2D& pose);
  void drive(const Twist& cmd);
  void publish_status();

  SystemConfig config_;
  TopicBus bus_;
  sim::Simulator sim_;
  TransformTree tree_;
  odometry::OdometrySource odom_;
  std::optional<odometry::OdometryPublisher> odom_pub_;
  mapping::Mapper mapper_;
  nav::Navigator nav_;
  TriStateMap static_map_;
  TriStateMap planning_cache_;
  ControlMode mode_ = ControlMode::kIdle;
  Twist teleop_;
  Twist last_cmd_;
  behaviors::BehaviorState behavior_;
  std::optional<behaviors::InPlaceTurn> turn_;
  bool capture_done_ = false;
  std::optional<nav::NavGoal> exploring_goal_;
  std::vector<Point2> blacklist_;
  std::size_t nav_history_seen_ = 0;
  std::size_t scans_ = 0;
  double next_map_publish_ = 0.0;
  std::vector<CommandRecord> commands_;
  std::vector<DetectionEvent> detections_;
  std::vector<behaviors::PhotoRecord> photos_;
  Subscription<Pose2D> goal_in_;
  Subscription<std::string> keys_in_;
};

}  // namespace eddie::system

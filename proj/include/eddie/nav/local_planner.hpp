#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "eddie/core/params.hpp"
#include "eddie/core/types.hpp"
#include "eddie/nav/costmap.hpp"
#include "eddie/nav/global_planner.hpp"

namespace eddie::nav {

class NoValidTrajectory : public std::runtime_error {
 public:
  NoValidTrajectory() : std::runtime_error("no valid trajectory") {}
};

struct NavGoal {
  Pose2D target;
  double xy_tolerance = 0.3;
  double yaw_tolerance = 0.2;

  static NavGoal at(const Pose2D& target, const ParamSet& p) {
    return {target, p.xy_goal_tolerance, p.yaw_goal_tolerance};
  }
};

bool goal_reached(const Pose2D& pose, const NavGoal& goal);

// A constant (v, w) candidate rolled forward from the robot pose.
struct Trajectory {
  Twist cmd;
  std::vector<Pose2D> poses;  // sampled along the rollout, excluding the start
  bool valid = false;
  double score = 0.0;
  double max_cost = 0.0;
};

struct RolloutContext {
  const Costmap* costmap = nullptr;
  const Plan* plan = nullptr;
  const ParamSet* params = nullptr;
  Footprint footprint;
  Pose2D robot;
  std::size_t plan_start = 0;  // nearest plan index to the robot
  std::size_t local_goal = 0;  // last plan index considered
};

// Rollout length in metres for speed v: the full sim_time at constant speed,
// shortened to max(distance_cap, stopping distance) when a cap is given.
double rollout_length(double v, double sim_time, double acc_lim_x, std::optional<double> distance_cap);

// Poses along a constant (v, w) arc for `duration` seconds, sampled at the
// configured linear and angular granularity.
std::vector<Pose2D> rollout(const Pose2D& start, double v, double w, double duration, const ParamSet& p);

// True when the pose keeps the footprint clear: centre cell below 253 and no
// lethal cell under the footprint outline. Cells off the map are rejected.
bool pose_is_safe(const Costmap& map, const Footprint& fp, const Pose2D& pose);
// The outline part of pose_is_safe alone.
bool footprint_clear(const Costmap& map, const Footprint& fp, const Pose2D& pose);

// Fills valid/score/max_cost for every trajectory. Lower score is better.
void score_trajectories(const RolloutContext& ctx, std::vector<Trajectory>& trajs);
void score_trajectories_serial(const RolloutContext& ctx, std::vector<Trajectory>& trajs);

enum class LocalMode { kForward, kRotate, kStopRotate };

struct LocalPlannerDebug {
  LocalMode mode = LocalMode::kForward;
  std::size_t candidates = 0;
  std::size_t valid = 0;
  double heading_error = 0.0;
};

// Trajectory-rollout controller. Keeps a latched "at goal position" flag
// between calls; reset() on a new goal.
class LocalPlanner {
 public:
  explicit LocalPlanner(ParamSet params, bool parallel = true);

  // Throws NoValidTrajectory when every candidate is unsafe.
  Twist compute_velocity(const Costmap& local, const Plan& plan, const Pose2D& pose, const Twist& prev_cmd,
                         const NavGoal& goal);

  void reset() { xy_latched_ = false; }
  bool xy_latched() const { return xy_latched_; }
  const LocalPlannerDebug& debug() const { return debug_; }
  const ParamSet& params() const { return params_; }

  // Escape motion: the configured reverse speed, no rotation.
  Twist escape_command() const { return {params_.escape_vel, 0.0}; }
  // Whether backing up at escape speed for `duration` seconds stays clear.
  bool escape_is_safe(const Costmap& local, const Pose2D& pose, double duration) const;

 private:
  ParamSet params_;
  Footprint footprint_;
  bool parallel_;
  bool xy_latched_ = false;
  LocalPlannerDebug debug_;
};

// One-shot form with a fresh planner.
Twist compute_velocity(const Costmap& local, const Plan& plan, const Pose2D& pose, const Twist& prev_cmd,
                       const ParamSet& params);

}  // namespace eddie::nav

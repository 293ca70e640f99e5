#pragma once

#include <optional>
#include <string>
#include <vector>

#include "eddie/core/grid.hpp"
#include "eddie/core/params.hpp"
#include "eddie/nav/costmap.hpp"
#include "eddie/nav/global_planner.hpp"
#include "eddie/nav/local_planner.hpp"

namespace eddie::nav {

enum class NavState { kIdle, kPlanning, kMoving, kRecovering, kSucceeded, kAborted };

const char* to_string(NavState s);

struct NavStatus {
  NavState state = NavState::kIdle;
  std::string reason;  // set for kAborted
  double stamp = 0.0;
};

// Goal-level navigation: global plan on the full map, local control on a
// rolling window, escape-and-replan recovery when the controller is stuck.
class Navigator {
 public:
  explicit Navigator(ParamSet params, bool parallel = true);

  // A new goal preempts the active one.
  void set_goal(const Pose2D& goal, double now);
  void cancel(double now);

  // One control cycle. Returns the velocity command; zero when no goal is
  // active.
  Twist update(double now, const Pose2D& pose, const TriStateMap& map);

  NavState state() const { return status_.state; }
  const NavStatus& status() const { return status_; }
  const std::vector<NavStatus>& history() const { return history_; }
  bool active() const;
  const std::optional<NavGoal>& goal() const { return goal_; }
  const Plan& plan() const { return plan_; }
  const Twist& last_command() const { return last_cmd_; }
  // The command actually sent last, when something else drove the base.
  void seed_command(const Twist& cmd) { last_cmd_ = cmd; }
  // Bumped on every successful (re)plan.
  std::size_t plan_version() const { return plan_version_; }
  int recoveries() const { return recoveries_; }
  const LocalPlanner& local_planner() const { return local_; }
  const ParamSet& params() const { return params_; }

 private:
  void transition(NavState s, double now, std::string reason = {});
  bool replan(double now, const Pose2D& pose, const TriStateMap& map);
  Twist finish(Twist cmd);

  ParamSet params_;
  InflationParams inflation_;
  LocalPlanner local_;
  NavStatus status_;
  std::vector<NavStatus> history_;
  std::optional<NavGoal> goal_;
  Plan plan_;
  Twist last_cmd_;
  double last_plan_time_ = 0.0;
  double escape_until_ = 0.0;
  int recoveries_ = 0;
  std::size_t plan_version_ = 0;
};

}  // namespace eddie::nav

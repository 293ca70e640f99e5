#include "eddie/nav/navigator.hpp"

#include <cmath>

namespace eddie::nav {

const char* to_string(NavState s) {
  switch (s) {
    case NavState::kIdle: return "idle";
    case NavState::kPlanning: return "planning";
    case NavState::kMoving: return "moving";
    case NavState::kRecovering: return "recovering";
    case NavState::kSucceeded: return "succeeded";
    case NavState::kAborted: return "aborted";
  }
  return "unknown";
}

Navigator::Navigator(ParamSet params, bool parallel)
    : params_(std::move(params)), inflation_(InflationParams::from_params(params_)), local_(params_, parallel) {
  history_.push_back(status_);
}

bool Navigator::active() const {
  return status_.state == NavState::kPlanning || status_.state == NavState::kMoving ||
         status_.state == NavState::kRecovering;
}

void Navigator::transition(NavState s, double now, std::string reason) {
  status_ = {s, std::move(reason), now};
  history_.push_back(status_);
}

void Navigator::set_goal(const Pose2D& goal, double now) {
  if (active()) transition(NavState::kAborted, now, "preempted");
  goal_ = NavGoal::at(goal, params_);
  plan_ = {};
  recoveries_ = 0;
  local_.reset();
  transition(NavState::kPlanning, now);
}

void Navigator::cancel(double now) {
  if (active()) transition(NavState::kAborted, now, "preempted");
  plan_ = {};
}

bool Navigator::replan(double now, const Pose2D& pose, const TriStateMap& map) {
  try {
    plan_ = plan_global(build_costmap(map, inflation_), pose, goal_->target);
  } catch (const PlanError& e) {
    transition(NavState::kAborted, now, e.what());
    return false;
  }
  last_plan_time_ = now;
  ++plan_version_;
  return true;
}

Twist Navigator::finish(Twist cmd) {
  last_cmd_ = cmd;
  return cmd;
}

Twist Navigator::update(double now, const Pose2D& pose, const TriStateMap& map) {
  if (!active()) return finish({});
  const double dt = 1.0 / params_.controller_frequency;

  if (status_.state == NavState::kRecovering) {
    if (now < escape_until_ - 1e-9) {
      const Costmap local = build_local_costmap(map, pose, params_.local_width, params_.local_height, inflation_);
      if (!local_.escape_is_safe(local, pose, dt)) {
        transition(NavState::kAborted, now, "escape blocked");
        return finish({});
      }
      return finish(local_.escape_command());
    }
    last_cmd_ = {};
    transition(NavState::kPlanning, now);
  }

  if (status_.state == NavState::kPlanning) {
    if (!replan(now, pose, map)) return finish({});
    transition(NavState::kMoving, now);
  } else if (now - last_plan_time_ >= 1.0 / params_.planner_frequency - 1e-9) {
    if (!replan(now, pose, map)) return finish({});
  }

  const double dv = params_.acc_lim_x * dt;
  const double dw = params_.acc_lim_theta * dt;
  const bool in_place = local_.xy_latched() || distance(pose, goal_->target) <= goal_->xy_tolerance;
  if (in_place && std::abs(angle_diff(goal_->target.theta, pose.theta)) <= goal_->yaw_tolerance &&
      std::abs(last_cmd_.linear) <= dv + 1e-12 && std::abs(last_cmd_.angular) <= dw + 1e-12) {
    transition(NavState::kSucceeded, now);
    return finish({});
  }

  const Costmap local = build_local_costmap(map, pose, params_.local_width, params_.local_height, inflation_);
  try {
    return finish(local_.compute_velocity(local, plan_, pose, last_cmd_, *goal_));
  } catch (const NoValidTrajectory& e) {
    if (recoveries_ >= params_.max_recoveries) {
      transition(NavState::kAborted, now, e.what());
      return finish({});
    }
    if (!local_.escape_is_safe(local, pose, params_.escape_duration)) {
      transition(NavState::kAborted, now, "escape blocked");
      return finish({});
    }
    ++recoveries_;
    escape_until_ = now + params_.escape_duration;
    transition(NavState::kRecovering, now);
    return finish(local_.escape_command());
  }
}

}  // namespace eddie::nav

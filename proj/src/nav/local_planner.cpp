#include "eddie/nav/local_planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "eddie/mapping/mapper.hpp"

namespace eddie::nav {
namespace {

Pose2D arc_pose(const Pose2D& s, double v, double w, double t) {
  if (std::abs(w) < 1e-9) return Pose2D(s.x + v * std::cos(s.theta) * t, s.y + v * std::sin(s.theta) * t, s.theta + w * t);
  const double th = s.theta + w * t;
  const double r = v / w;
  return Pose2D(s.x + r * (std::sin(th) - std::sin(s.theta)), s.y - r * (std::cos(th) - std::cos(s.theta)), th);
}

std::vector<double> linspace(double lo, double hi, int n) {
  if (n <= 1 || hi - lo < 1e-12) return {hi};
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
  out.back() = hi;
  return out;
}

std::size_t nearest_index(const Plan& plan, const Pose2D& pose) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < plan.poses.size(); ++i) {
    const double d = distance(plan.poses[i], pose);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

// Remaining along-plan length from index i to the end.
std::vector<double> suffix_lengths(const Plan& plan) {
  std::vector<double> out(plan.poses.size(), 0.0);
  for (std::size_t i = plan.poses.size(); i-- > 1;) out[i - 1] = out[i] + distance(plan.poses[i - 1], plan.poses[i]);
  return out;
}

struct PlanMetric {
  double path_dist;  // m
  double goal_dist;  // m, along the plan to the local goal
};

PlanMetric plan_metric(const RolloutContext& ctx, const std::vector<double>& suffix, const Pose2D& p) {
  double best = std::numeric_limits<double>::infinity();
  std::size_t k = ctx.plan_start;
  for (std::size_t i = ctx.plan_start; i <= ctx.local_goal; ++i) {
    const double d = distance(ctx.plan->poses[i], p);
    if (d < best) {
      best = d;
      k = i;
    }
  }
  return {best, best + suffix[k] - suffix[ctx.local_goal]};
}

void score_one(const RolloutContext& ctx, const std::vector<double>& suffix, Trajectory& t) {
  const Costmap& map = *ctx.costmap;
  const ParamSet& p = *ctx.params;
  const Pose2D& start = ctx.robot;
  t.valid = pose_is_safe(map, ctx.footprint, start);
  t.max_cost = 0.0;
  for (const auto& pose : t.poses) {
    if (!t.valid) break;
    if (!pose_is_safe(map, ctx.footprint, pose)) {
      t.valid = false;
      break;
    }
    const CellIndex c = map.geometry.world_to_cell(pose.x, pose.y);
    t.max_cost = std::max(t.max_cost, static_cast<double>(map.at(c)));
  }
  if (!t.valid) {
    t.score = std::numeric_limits<double>::infinity();
    return;
  }
  const Pose2D end = t.poses.empty() ? start : t.poses.back();
  const Pose2D fwd(end.x + p.forward_point_distance * std::cos(end.theta),
                   end.y + p.forward_point_distance * std::sin(end.theta), end.theta);
  const double res = map.geometry.resolution;
  const PlanMetric me = plan_metric(ctx, suffix, end);
  const PlanMetric mf = plan_metric(ctx, suffix, fwd);
  t.score = p.path_distance_bias * (me.path_dist + mf.path_dist) / res +
            p.goal_distance_bias * (me.goal_dist + mf.goal_dist) / res + p.occdist_scale * t.max_cost;
}

}  // namespace

bool goal_reached(const Pose2D& pose, const NavGoal& goal) {
  return distance(pose, goal.target) <= goal.xy_tolerance &&
         std::abs(angle_diff(goal.target.theta, pose.theta)) <= goal.yaw_tolerance;
}

double rollout_length(double v, double sim_time, double acc_lim_x, std::optional<double> distance_cap) {
  const double full = std::abs(v) * sim_time;
  if (!distance_cap) return full;
  const double stopping = v * v / (2.0 * acc_lim_x);
  return std::min(full, std::max(*distance_cap, stopping));
}

std::vector<Pose2D> rollout(const Pose2D& start, double v, double w, double duration, const ParamSet& p) {
  const double lin = std::abs(v) * duration;
  const double ang = std::abs(w) * duration;
  if (lin == 0.0 && ang == 0.0) return {};
  const int n = std::max({1, static_cast<int>(std::ceil(lin / p.sim_granularity)),
                          static_cast<int>(std::ceil(ang / p.angular_sim_granularity))});
  std::vector<Pose2D> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) out.push_back(arc_pose(start, v, w, duration * i / n));
  return out;
}

bool pose_is_safe(const Costmap& map, const Footprint& fp, const Pose2D& pose) {
  const GridGeometry& g = map.geometry;
  const CellIndex c = g.world_to_cell(pose.x, pose.y);
  if (!g.contains(c) || map.at(c) >= kInscribed) return false;
  return footprint_clear(map, fp, pose);
}

bool footprint_clear(const Costmap& map, const Footprint& fp, const Pose2D& pose) {
  const GridGeometry& g = map.geometry;
  const Polygon outline = transform_polygon(fp.polygon, pose);
  for (std::size_t i = 0; i < outline.size(); ++i) {
    for (const CellIndex& cell : mapping::traverse(g, outline[i], outline[(i + 1) % outline.size()])) {
      if (!g.contains(cell) || map.at(cell) >= kLethal) return false;
    }
  }
  return true;
}

void score_trajectories(const RolloutContext& ctx, std::vector<Trajectory>& trajs) {
  const std::vector<double> suffix = suffix_lengths(*ctx.plan);
  const long n = static_cast<long>(trajs.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < n; ++i) {
    auto& t = trajs[static_cast<std::size_t>(i)];
    score_one(ctx, suffix, t);
  }
}

void score_trajectories_serial(const RolloutContext& ctx, std::vector<Trajectory>& trajs) {
  const std::vector<double> suffix = suffix_lengths(*ctx.plan);
  for (auto& t : trajs) score_one(ctx, suffix, t);
}

namespace {

// Yaw rate profile that reaches zero error without overshoot at the
// angular acceleration limit.
double rotate_target(double err, double deadband, const ParamSet& p) {
  const double mag = std::abs(err) - deadband;
  if (mag <= 0.0) return 0.0;
  return std::copysign(std::min(p.min_in_place_vel_theta, std::sqrt(2.0 * p.acc_lim_theta * mag)), err);
}

// Point on the plan `ahead` metres past index i (the last pose if shorter).
Pose2D carrot(const Plan& plan, std::size_t i, double ahead) {
  double acc = 0.0;
  for (std::size_t k = i + 1; k < plan.poses.size(); ++k) {
    acc += distance(plan.poses[k - 1], plan.poses[k]);
    if (acc >= ahead) return plan.poses[k];
  }
  return plan.poses.back();
}

}  // namespace

LocalPlanner::LocalPlanner(ParamSet params, bool parallel)
    : params_(std::move(params)), footprint_(Footprint::from_params(params_)), parallel_(parallel) {}

bool LocalPlanner::escape_is_safe(const Costmap& local, const Pose2D& pose, double duration) const {
  for (const Pose2D& q : rollout(pose, params_.escape_vel, 0.0, duration, params_))
    if (!footprint_clear(local, footprint_, q)) return false;
  return true;
}

Twist LocalPlanner::compute_velocity(const Costmap& local, const Plan& plan, const Pose2D& pose,
                                     const Twist& prev, const NavGoal& goal) {
  const ParamSet& p = params_;
  if (plan.empty()) throw NoValidTrajectory();
  const double dt = 1.0 / p.controller_frequency;
  const double dv = p.acc_lim_x * dt;
  const double dw = p.acc_lim_theta * dt;

  RolloutContext ctx;
  ctx.costmap = &local;
  ctx.plan = &plan;
  ctx.params = &p;
  ctx.footprint = footprint_;
  ctx.robot = pose;
  ctx.plan_start = nearest_index(plan, pose);
  ctx.local_goal = ctx.plan_start;
  while (ctx.local_goal + 1 < plan.poses.size()) {
    const Pose2D& q = plan.poses[ctx.local_goal + 1];
    if (!local.geometry.contains(local.geometry.world_to_cell(q.x, q.y))) break;
    ++ctx.local_goal;
  }
  const std::vector<double> suffix = suffix_lengths(plan);
  const double remaining = distance(pose, plan.poses[ctx.plan_start]) + suffix[ctx.plan_start];

  if (distance(pose, goal.target) <= goal.xy_tolerance) xy_latched_ = true;

  const Pose2D c = carrot(plan, ctx.plan_start, p.carrot_distance);
  const double to_carrot = distance(pose, c);
  double heading_err = to_carrot > 1e-6 ? angle_diff(std::atan2(c.y - pose.y, c.x - pose.x), pose.theta) : 0.0;
  const bool stopped = std::abs(prev.linear) < 1e-9;

  LocalMode mode = LocalMode::kForward;
  if (xy_latched_) {
    mode = LocalMode::kStopRotate;
    heading_err = angle_diff(goal.target.theta, pose.theta);
  } else if (std::abs(heading_err) > p.rotate_in_place_threshold ||
             (stopped && (std::abs(heading_err) > goal.yaw_tolerance ||
                          (std::abs(prev.angular) > 1e-9 && std::abs(heading_err) > goal.yaw_tolerance / 4.0)))) {
    mode = LocalMode::kRotate;
  }

  // Reachable yaw rates this cycle.
  const double w_lo = std::max(p.min_vel_theta, prev.angular - dw);
  const double w_hi = std::min(p.max_vel_theta, prev.angular + dw);
  std::vector<double> ws = linspace(std::min(w_lo, w_hi), w_hi, p.vtheta_samples);
  if (w_lo <= 0.0 && 0.0 <= w_hi) ws.push_back(0.0);
  double w_target = 0.0;
  if (mode != LocalMode::kForward) {
    const double deadband = mode == LocalMode::kStopRotate ? goal.yaw_tolerance / 2.0 : 0.0;
    w_target = rotate_target(heading_err, deadband, p);
    ws.push_back(std::clamp(w_target, std::min(w_lo, w_hi), w_hi));
  }
  std::sort(ws.begin(), ws.end());
  ws.erase(std::unique(ws.begin(), ws.end()), ws.end());

  const double v_brake = std::max(0.0, prev.linear - dv);
  std::vector<double> vs;
  if (mode == LocalMode::kForward) {
    const double cap = std::min(p.max_vel_x, std::sqrt(2.0 * p.acc_lim_x * remaining));
    double hi = std::min(prev.linear + dv, cap);
    double lo = prev.linear - dv;
    if (hi < lo) hi = lo;
    lo = std::max(lo, 0.0);
    hi = std::max(hi, 0.0);
    if (hi >= p.min_vel_x) {
      vs = linspace(std::max(lo, p.min_vel_x), hi, p.vx_samples);
    } else {
      vs = {hi};  // ramping through the dead band below min_vel_x
    }
  } else {
    vs = {v_brake};
  }

  auto build = [&](const std::vector<double>& vlist) {
    std::vector<Trajectory> out;
    for (double v : vlist)
      for (double w : ws) {
        Trajectory t;
        t.cmd = {v, w};
        double duration = p.sim_time;
        if (v > 0.0) {
          const bool slowing = v < prev.linear - 1e-12 || mode != LocalMode::kForward;
          const double len = slowing ? std::min(v * p.sim_time, v * v / (2.0 * p.acc_lim_x))
                                     : rollout_length(v, p.sim_time, p.acc_lim_x, remaining);
          duration = len / v;
        }
        t.poses = rollout(pose, v, w, duration, p);
        // Turning modes keep rotating after the robot has stopped; check that
        // sweep too.
        if (mode != LocalMode::kForward && w != 0.0 && duration < p.sim_time) {
          const Pose2D end = t.poses.empty() ? pose : t.poses.back();
          const auto spin = rollout(end, 0.0, w, p.sim_time - duration, p);
          t.poses.insert(t.poses.end(), spin.begin(), spin.end());
        }
        out.push_back(std::move(t));
      }
    return out;
  };
  auto evaluate = [&](std::vector<Trajectory>& trajs) {
    if (parallel_)
      score_trajectories(ctx, trajs);
    else
      score_trajectories_serial(ctx, trajs);
  };
  auto pick = [&](const std::vector<Trajectory>& trajs) -> const Trajectory* {
    const Trajectory* best = nullptr;
    double best_key = std::numeric_limits<double>::infinity();
    for (const auto& t : trajs) {
      if (!t.valid) continue;
      const double key = mode == LocalMode::kForward ? t.score : std::abs(t.cmd.angular - w_target);
      if (key < best_key) {
        best_key = key;
        best = &t;
      }
    }
    return best;
  };

  std::vector<Trajectory> trajs = build(vs);
  evaluate(trajs);
  const Trajectory* best = pick(trajs);
  std::size_t candidates = trajs.size();
  std::size_t valid = static_cast<std::size_t>(std::count_if(trajs.begin(), trajs.end(), [](auto& t) { return t.valid; }));
  std::vector<Trajectory> fallback;
  if (!best && std::find(vs.begin(), vs.end(), v_brake) == vs.end()) {
    fallback = build({v_brake});
    evaluate(fallback);
    best = pick(fallback);
    candidates += fallback.size();
    valid += static_cast<std::size_t>(std::count_if(fallback.begin(), fallback.end(), [](auto& t) { return t.valid; }));
  }
  debug_ = {mode, candidates, valid, heading_err};
  if (!best) throw NoValidTrajectory();
  return best->cmd;
}

Twist compute_velocity(const Costmap& local, const Plan& plan, const Pose2D& pose, const Twist& prev_cmd,
                       const ParamSet& params) {
  if (plan.empty()) throw NoValidTrajectory();
  LocalPlanner lp(params);
  return lp.compute_velocity(local, plan, pose, prev_cmd, NavGoal::at(plan.poses.back(), params));
}

}  // namespace eddie::nav

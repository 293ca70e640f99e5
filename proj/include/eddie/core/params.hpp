#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "eddie/core/geometry.hpp"

namespace eddie {

// Raised for malformed or invalid parameter files. `line` is 1-based, 0 when
// the problem is not tied to a line (e.g. a cross-key invariant).
class ParamError : public std::runtime_error {
 public:
  ParamError(const std::string& what, std::string key, int line)
      : std::runtime_error(what), key_(std::move(key)), line_(line) {}
  const std::string& key() const { return key_; }
  int line() const { return line_; }

 private:
  std::string key_;
  int line_;
};

// Navigation, costmap and robot parameters. Defaults are the robot's tuned
// configuration; wheel radius, track width and the motor calibration are
// platform guesses, not measured values.
struct ParamSet {
  // base local planner
  double controller_frequency = 15.0;
  bool holonomic_robot = false;
  double yaw_goal_tolerance = 0.2;
  double xy_goal_tolerance = 0.3;
  double sim_time = 4.0;
  int vtheta_samples = 40;

  // costmap common
  Polygon footprint{{-0.1, -0.1}, {-0.1, 0.1}, {0.1, 0.1}, {0.1, -0.1}};
  double transform_tolerance = 0.3;
  double publish_frequency = 10.0;
  double inflation_radius = 1.75;
  double cost_scaling_factor = 2.58;

  // global costmap
  double global_update_frequency = 10.0;
  bool global_static_map = true;

  // local costmap
  double local_update_frequency = 10.0;
  double local_publish_frequency = 10.0;
  bool local_static_map = false;
  bool rolling_window = true;
  double local_width = 6.0;
  double local_height = 6.0;
  double resolution = 0.05;

  // speed and acceleration
  double max_vel_x = 0.175;
  double min_vel_x = 0.175;
  double max_vel_theta = 1.0;
  double min_vel_theta = -1.0;
  double min_in_place_vel_theta = 1.0;
  double escape_vel = -0.175;
  double acc_lim_theta = 0.5;  // rad/s^2
  double acc_lim_x = 0.05;     // m/s^2
  double acc_lim_y = 0.05;

  // robot geometry
  double wheel_radius = 0.0762;
  double track_width = 0.39;
  int ticks_per_rev = 36;

  // motor calibration (RPM per ms of pulse width, absolute pulse limits in ms)
  double motor_k = 100.0;
  double pw_min = 1.0;
  double pw_neutral = 1.5;
  double pw_max = 2.0;

  // trajectory scoring and recovery
  int vx_samples = 3;
  double path_distance_bias = 0.6;
  double goal_distance_bias = 0.8;
  double occdist_scale = 0.01;
  double forward_point_distance = 0.325;
  double sim_granularity = 0.025;
  double angular_sim_granularity = 0.025;
  double carrot_distance = 0.5;
  double rotate_in_place_threshold = 1.0471975511965976;
  double escape_duration = 1.0;
  int max_recoveries = 3;
  double planner_frequency = 1.0;

  double inscribed_radius() const { return polygon_inscribed_radius(footprint); }
  double circumscribed_radius() const { return polygon_circumscribed_radius(footprint); }

  bool operator==(const ParamSet&) const = default;
};

// Throws ParamError naming the offending key.
void validate(const ParamSet& params);

// `key: value` per line, `#` starts a comment, lists as `[a, b]`, the
// footprint as a nested list. Absent keys keep their defaults.
ParamSet parse_params(const std::string& text);
ParamSet load_params(const std::filesystem::path& path);

// Every key, one per line, in a form parse_params reads back exactly.
std::string format_params(const ParamSet& params);
void save_params(const ParamSet& params, const std::filesystem::path& path);

}  // namespace eddie

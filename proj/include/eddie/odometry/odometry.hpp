#pragma once

#include <limits>

#include "eddie/core/bus.hpp"
#include "eddie/core/params.hpp"
#include "eddie/core/types.hpp"
#include "eddie/drive/encoder.hpp"

namespace eddie::odometry {

struct DriveGeometry {
  double wheel_radius = 0.0762;  // m
  double track_width = 0.39;     // m, wheel separation D
  int ticks_per_rev = 36;

  static DriveGeometry from_params(const ParamSet& p) { return {p.wheel_radius, p.track_width, p.ticks_per_rev}; }
};

// Below this yaw rate the motion is integrated as a straight line.
inline constexpr double kStraightEpsilon = 1e-9;
inline constexpr double kInfiniteRadius = std::numeric_limits<double>::infinity();

struct Icc {
  double omega = 0.0;                 // rad/s
  double radius = kInfiniteRadius;    // m from base center to the ICC
  bool straight() const { return radius == kInfiniteRadius; }
};

// omega = (V_r - V_l)/D; R = D/2 * (V_r + V_l)/(V_r - V_l), infinite when
// the wheel speeds are equal.
Icc icc(double v_left, double v_right, double track_width);

double center_velocity(double v_left, double v_right);

struct OdometryState {
  Pose2D pose;
  double v_s = 0.0;                // m/s
  double omega = 0.0;              // rad/s
  double radius = kInfiniteRadius; // m
  double stamp = 0.0;              // s
};

// Exact constant-velocity arc over dt. Throws std::invalid_argument for dt <= 0.
OdometryState integrate_step(const OdometryState& state, double v_left, double v_right, double dt,
                             double track_width);

// Converts one tick report per wheel into wheel speeds (ticks * d / pulse
// width) and integrates them over the shortest of the reporting intervals.
OdometryState update_from_ticks(const OdometryState& state, const drive::EncoderEvent& left,
                                const drive::EncoderEvent& right, const DriveGeometry& geometry);

struct OdometryMsg {
  Pose2D pose;
  Twist twist;
  double stamp = 0.0;
};

inline constexpr const char* kOdomTopic = "/odom";
inline constexpr const char* kEncoderTopic = "/encoder";

// Publishes on "/odom"; rejects stamps that do not strictly increase.
class OdometryPublisher {
 public:
  explicit OdometryPublisher(TopicBus& bus);
  OdometryMsg publish(const OdometryState& state);

 private:
  TopicBus& bus_;
  double last_stamp_ = -std::numeric_limits<double>::infinity();
};

// Streaming dead reckoning: accumulates asynchronous per-wheel tick events
// and integrates them at sync points, each wheel reporting its summed ticks
// over the common window.
class OdometrySource {
 public:
  OdometrySource(DriveGeometry geometry, Pose2D start = {}, double stamp = 0.0);

  void add(const drive::EncoderEvent& event);
  const OdometryState& sync(double now);
  const OdometryState& state() const { return state_; }
  void reset(const Pose2D& pose, double stamp);

 private:
  DriveGeometry geometry_;
  OdometryState state_;
  int pending_left_ = 0;
  int pending_right_ = 0;
};

}  // namespace eddie::odometry

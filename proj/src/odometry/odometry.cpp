#include "eddie/odometry/odometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace eddie::odometry {

Icc icc(double v_left, double v_right, double track_width) {
  if (!(track_width > 0.0)) throw std::invalid_argument("track width must be > 0");
  Icc out;
  out.omega = (v_right - v_left) / track_width;
  if (v_left != v_right) out.radius = track_width / 2.0 * (v_right + v_left) / (v_right - v_left);
  return out;
}

double center_velocity(double v_left, double v_right) { return (v_left + v_right) / 2.0; }

OdometryState integrate_step(const OdometryState& state, double v_left, double v_right, double dt,
                             double track_width) {
  if (!(dt > 0.0)) throw std::invalid_argument("integration step must be > 0");
  const Icc c = icc(v_left, v_right, track_width);
  const double vs = center_velocity(v_left, v_right);
  const Pose2D& p = state.pose;

  OdometryState next;
  next.v_s = vs;
  next.omega = c.omega;
  next.radius = c.radius;
  next.stamp = state.stamp + dt;
  if (std::abs(c.omega) < kStraightEpsilon) {
    next.pose = Pose2D(p.x + vs * std::cos(p.theta) * dt, p.y + vs * std::sin(p.theta) * dt,
                       p.theta + c.omega * dt);
  } else {
    // Unwrapped heading keeps the sin/cos differences exact across +-pi.
    const double th1 = p.theta + c.omega * dt;
    const double r = vs / c.omega;
    next.pose = Pose2D(p.x + r * (std::sin(th1) - std::sin(p.theta)), p.y - r * (std::cos(th1) - std::cos(p.theta)), th1);
  }
  return next;
}

OdometryState update_from_ticks(const OdometryState& state, const drive::EncoderEvent& left,
                                const drive::EncoderEvent& right, const DriveGeometry& geometry) {
  const double d = drive::tick_distance(geometry.wheel_radius, geometry.ticks_per_rev);
  auto speed = [&](const drive::EncoderEvent& e) {
    if (e.ticks == 0) return 0.0;
    if (!(e.pulse_width > 0.0)) throw std::invalid_argument("encoder event with ticks needs a positive pulse width");
    return e.ticks * d / e.pulse_width;
  };
  const double vl = speed(left);
  const double vr = speed(right);
  if (left.ticks == 0 && right.ticks == 0) {
    OdometryState out = state;
    out.v_s = 0.0;
    out.omega = 0.0;
    out.radius = kInfiniteRadius;
    out.stamp = std::max({state.stamp, left.stamp, right.stamp});
    return out;
  }
  double dt = std::numeric_limits<double>::infinity();
  if (left.ticks != 0) dt = std::min(dt, left.pulse_width);
  if (right.ticks != 0) dt = std::min(dt, right.pulse_width);
  OdometryState out = integrate_step(state, vl, vr, dt, geometry.track_width);
  out.stamp = std::max({out.stamp, left.stamp, right.stamp});
  return out;
}

OdometryPublisher::OdometryPublisher(TopicBus& bus) : bus_(bus) { bus_.advertise<OdometryMsg>(kOdomTopic); }

OdometryMsg OdometryPublisher::publish(const OdometryState& state) {
  if (!(state.stamp > last_stamp_)) throw std::logic_error("odometry stamps must strictly increase");
  last_stamp_ = state.stamp;
  OdometryMsg msg{state.pose, Twist{state.v_s, state.omega}, state.stamp};
  bus_.publish(kOdomTopic, msg);
  return msg;
}

OdometrySource::OdometrySource(DriveGeometry geometry, Pose2D start, double stamp) : geometry_(geometry) {
  state_.pose = start;
  state_.stamp = stamp;
}

void OdometrySource::add(const drive::EncoderEvent& event) {
  if (event.wheel == drive::Wheel::kLeft) {
    pending_left_ += event.ticks;
  } else {
    pending_right_ += event.ticks;
  }
}

const OdometryState& OdometrySource::sync(double now) {
  const double window = now - state_.stamp;
  if (!(window > 0.0)) return state_;
  const drive::EncoderEvent left{drive::Wheel::kLeft, pending_left_, window, now};
  const drive::EncoderEvent right{drive::Wheel::kRight, pending_right_, window, now};
  state_ = update_from_ticks(state_, left, right, geometry_);
  state_.stamp = now;
  pending_left_ = 0;
  pending_right_ = 0;
  return state_;
}

void OdometrySource::reset(const Pose2D& pose, double stamp) {
  state_ = OdometryState{};
  state_.pose = pose;
  state_.stamp = stamp;
  pending_left_ = pending_right_ = 0;
}

}  // namespace eddie::odometry

#include "eddie/drive/motor.hpp"

#include <algorithm>
#include <cmath>

namespace eddie::drive {
namespace {
// meters per second per RPM
double rpm_to_speed(const MotorCalibration& c) { return kTwoPi * c.wheel_radius / 60.0; }
}  // namespace

void MotorCalibration::validate() const {
  if (!(k > 0.0)) throw std::invalid_argument("motor K must be > 0");
  if (!(wheel_radius > 0.0)) throw std::invalid_argument("wheel radius must be > 0");
  if (!(pw_min < pw_neutral && pw_neutral < pw_max)) throw std::invalid_argument("need pw_min < pw_neutral < pw_max");
}

double calibrate_k(double rpm_measured, double pw_ms) {
  if (!(pw_ms > 0.0)) throw std::invalid_argument("pulse width must be > 0 to calibrate K");
  if (rpm_measured < 0.0) throw std::invalid_argument("measured RPM must be >= 0");
  return rpm_measured / pw_ms;
}

WheelVelocity pulse_width_to_velocity(double offset_ms, const MotorCalibration& calib) {
  const double lo = calib.max_reverse_offset();
  const double hi = calib.max_forward_offset();
  const double pw = std::clamp(offset_ms, lo, hi);
  return {rpm_to_speed(calib) * calib.k * pw, pw != offset_ms};
}

PulseCommand velocity_to_pulse_width(double velocity, const MotorCalibration& calib) {
  const double pw = velocity / (rpm_to_speed(calib) * calib.k);
  const double lo = calib.max_reverse_offset();
  const double hi = calib.max_forward_offset();
  const double clamped = std::clamp(pw, lo, hi);
  return {clamped, clamped != pw};
}

WheelSpeeds twist_to_wheel_speeds(const Twist& cmd, double track_width) {
  if (!(track_width > 0.0)) throw std::invalid_argument("track width must be > 0");
  const double half = cmd.angular * track_width / 2.0;
  return {cmd.linear - half, cmd.linear + half};
}

Twist wheel_speeds_to_twist(const WheelSpeeds& w, double track_width) {
  if (!(track_width > 0.0)) throw std::invalid_argument("track width must be > 0");
  return {(w.left + w.right) / 2.0, (w.right - w.left) / track_width};
}

}  // namespace eddie::drive

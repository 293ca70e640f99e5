#pragma once

#include <stdexcept>

#include "eddie/core/params.hpp"
#include "eddie/core/types.hpp"

namespace eddie::drive {

// Linear RPM/pulse-width motor model: RPM = K * PW, V = 2*pi*r/60 * RPM.
// Pulse widths are absolute milliseconds; commands are expressed as a signed
// offset from the neutral width.
struct MotorCalibration {
  double k = 100.0;           // RPM per ms of pulse width offset
  double wheel_radius = 0.0762;
  double pw_min = 1.0;        // ms
  double pw_neutral = 1.5;    // ms
  double pw_max = 2.0;        // ms

  static MotorCalibration from_params(const ParamSet& p) {
    return {p.motor_k, p.wheel_radius, p.pw_min, p.pw_neutral, p.pw_max};
  }
  void validate() const;

  double max_forward_offset() const { return pw_max - pw_neutral; }
  double max_reverse_offset() const { return pw_min - pw_neutral; }  // negative
};

struct PulseCommand {
  double offset_ms = 0.0;  // signed, relative to neutral
  bool clamped = false;
  double absolute_ms(const MotorCalibration& c) const { return c.pw_neutral + offset_ms; }
};

struct WheelVelocity {
  double velocity = 0.0;  // m/s
  bool clamped = false;
};

struct WheelSpeeds {
  double left = 0.0;   // m/s
  double right = 0.0;  // m/s
  bool operator==(const WheelSpeeds&) const = default;
};

// K from one tachometer reading. Throws std::invalid_argument for pw <= 0.
double calibrate_k(double rpm_measured, double pw_ms);

// Signed offset from neutral -> wheel surface speed. Offsets beyond the
// calibrated pulse range are clamped and flagged.
WheelVelocity pulse_width_to_velocity(double offset_ms, const MotorCalibration& calib);

// Inverse of pulse_width_to_velocity inside the pulse range.
PulseCommand velocity_to_pulse_width(double velocity, const MotorCalibration& calib);

// V_l = v - w*D/2, V_r = v + w*D/2.
WheelSpeeds twist_to_wheel_speeds(const Twist& cmd, double track_width);

// v = (V_l + V_r)/2, w = (V_r - V_l)/D.
Twist wheel_speeds_to_twist(const WheelSpeeds& w, double track_width);

}  // namespace eddie::drive

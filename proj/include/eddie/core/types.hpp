#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <vector>

namespace eddie {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Wraps an angle into (-pi, pi].
inline double normalize_angle(double angle) {
  double a = std::remainder(angle, kTwoPi);
  if (a <= -kPi) a += kTwoPi;
  return a;
}

// Signed shortest rotation taking `from` onto `to`.
inline double angle_diff(double to, double from) { return normalize_angle(to - from); }

struct Pose2D {
  double x = 0.0;      // m
  double y = 0.0;      // m
  double theta = 0.0;  // rad, kept in (-pi, pi]

  Pose2D() = default;
  Pose2D(double x_, double y_, double theta_) : x(x_), y(y_), theta(normalize_angle(theta_)) {}

  bool operator==(const Pose2D&) const = default;
};

inline double distance(const Pose2D& a, const Pose2D& b) { return std::hypot(a.x - b.x, a.y - b.y); }

// Velocity command: forward speed and yaw rate.
struct Twist {
  double linear = 0.0;   // m/s
  double angular = 0.0;  // rad/s

  bool operator==(const Twist&) const = default;
  bool is_zero() const { return linear == 0.0 && angular == 0.0; }
};

// Planar range scan. Beams without a return carry kNoReading.
struct LaserScan {
  static constexpr double kNoReading = std::numeric_limits<double>::infinity();

  double angle_min = 0.0;
  double angle_max = 0.0;
  double angle_increment = 0.0;
  double range_min = 0.0;
  double range_max = 0.0;
  std::vector<double> ranges;
  double stamp = 0.0;

  static bool is_reading(double r) { return std::isfinite(r); }

  // floor((angle_max - angle_min) / angle_increment) + 1
  static std::size_t expected_beams(double angle_min, double angle_max, double angle_increment) {
    return static_cast<std::size_t>(std::floor((angle_max - angle_min) / angle_increment + 1e-9)) + 1;
  }
  double beam_angle(std::size_t i) const { return angle_min + static_cast<double>(i) * angle_increment; }
};

}  // namespace eddie

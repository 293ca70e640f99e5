#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "eddie/core/geometry.hpp"
#include "eddie/core/params.hpp"
#include "eddie/drive/encoder.hpp"
#include "eddie/drive/motor.hpp"
#include "eddie/sim/sensors.hpp"
#include "eddie/sim/world.hpp"

namespace eddie::sim {

struct SimConfig {
  ScanConfig scan;
  FaceConfig face;
  drive::MotorCalibration motor;
  Polygon footprint;
  double track_width = 0.39;
  int ticks_per_rev = 36;
  double max_substep = 1.0 / 15.0;  // s
  std::uint64_t seed = 1;

  static SimConfig from_params(const ParamSet& p);
};

struct StepResult {
  std::vector<drive::EncoderEvent> encoder;  // in stamp order
  std::optional<LaserScan> scan;
  bool collision = false;
};

// Kinematic differential-drive robot in a static world. Encoders are
// emulated edge by edge through the quadrature decoder; a tick event is
// emitted each time a wheel completes a full Gray cycle.
class Simulator {
 public:
  Simulator(Scenario scenario, SimConfig config);

  // Signed pulse offsets from neutral, converted through the motor model.
  void set_wheel_pulses(double left_offset_ms, double right_offset_ms);
  void set_wheel_speeds(const drive::WheelSpeeds& speeds);
  const drive::WheelSpeeds& wheel_speeds() const { return speeds_; }

  // Advances by dt (> 0), internally in substeps of at most max_substep.
  // Motion that would overlap an obstacle stops at contact.
  StepResult step(double dt);

  std::vector<FaceDetection> detect_faces();
  LaserScan scan_now();

  const Pose2D& ground_truth() const { return pose_; }
  double time() const { return time_; }
  const World& world() const { return scenario_.world; }
  const Scenario& scenario() const { return scenario_; }
  const SimConfig& config() const { return config_; }
  double wheel_angle(drive::Wheel w) const { return wheel(w).angle; }
  std::int64_t wheel_ticks(drive::Wheel w) const { return wheel(w).reported_ticks; }
  double tick_quantum() const;  // rad per tick
  bool ever_collided() const { return ever_collided_; }

 private:
  struct WheelEncoder {
    double angle = 0.0;  // rad
    drive::QuadratureState quad;
    std::int64_t reported_ticks = 0;
    double last_tick_stamp = 0.0;
  };

  const WheelEncoder& wheel(drive::Wheel w) const { return w == drive::Wheel::kLeft ? left_ : right_; }
  void advance_wheel(WheelEncoder& enc, drive::Wheel which, double delta, double t0, double t1,
                     std::vector<drive::EncoderEvent>& out);
  bool collides(const Pose2D& pose) const;

  Scenario scenario_;
  SimConfig config_;
  Pose2D pose_;
  drive::WheelSpeeds speeds_;
  WheelEncoder left_;
  WheelEncoder right_;
  double time_ = 0.0;
  double next_scan_ = 0.0;
  bool ever_collided_ = false;
  std::mt19937_64 rng_;
};

}  // namespace eddie::sim

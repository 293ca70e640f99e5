#include "eddie/sim/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <stdexcept>

#include "eddie/odometry/odometry.hpp"

namespace eddie::sim {

SimConfig SimConfig::from_params(const ParamSet& p) {
  SimConfig c;
  c.motor = drive::MotorCalibration::from_params(p);
  c.footprint = p.footprint;
  c.track_width = p.track_width;
  c.ticks_per_rev = p.ticks_per_rev;
  c.max_substep = 1.0 / p.controller_frequency;
  return c;
}

Simulator::Simulator(Scenario scenario, SimConfig config)
    : scenario_(std::move(scenario)), config_(std::move(config)), pose_(scenario_.robot_start), rng_(config_.seed) {
  config_.scan.validate();
  next_scan_ = 1.0 / config_.scan.rate;
  config_.motor.validate();
  if (!(config_.max_substep > 0.0)) throw std::invalid_argument("max_substep must be > 0");
  if (config_.footprint.size() < 3) throw std::invalid_argument("footprint needs at least 3 vertices");
  if (collides(pose_)) throw ScenarioError("robot_start", "footprint overlaps an obstacle");
}

double Simulator::tick_quantum() const { return kTwoPi / config_.ticks_per_rev; }

void Simulator::set_wheel_pulses(double left_offset_ms, double right_offset_ms) {
  speeds_.left = drive::pulse_width_to_velocity(left_offset_ms, config_.motor).velocity;
  speeds_.right = drive::pulse_width_to_velocity(right_offset_ms, config_.motor).velocity;
}

void Simulator::set_wheel_speeds(const drive::WheelSpeeds& speeds) { speeds_ = speeds; }

bool Simulator::collides(const Pose2D& pose) const {
  return polygon_hits_world(scenario_.world, transform_polygon(config_.footprint, pose));
}

void Simulator::advance_wheel(WheelEncoder& enc, drive::Wheel which, double delta, double t0, double t1,
                              std::vector<drive::EncoderEvent>& out) {
  if (delta == 0.0) return;
  const double q = tick_quantum() / drive::kEdgesPerTick;
  const double a = enc.angle;
  const double b = a + delta;
  const auto k0 = static_cast<std::int64_t>(std::floor(a / q));
  const auto k1 = static_cast<std::int64_t>(std::floor(b / q));
  const drive::Direction dir = delta > 0 ? drive::Direction::kForward : drive::Direction::kBackward;
  const std::int64_t crossings = delta > 0 ? k1 - k0 : k0 - k1;
  for (std::int64_t i = 1; i <= crossings; ++i) {
    // Boundary k*q crossed moving up is k0+i; moving down it is k0-i+1.
    const std::int64_t k = delta > 0 ? k0 + i : k0 - i + 1;
    const double t = t0 + (static_cast<double>(k) * q - a) / delta * (t1 - t0);
    enc.quad = drive::decode_quadrature(enc.quad, drive::next_edge(enc.quad, dir)).state;
    const std::int64_t ticks = drive::ticks_from_edges(enc.quad.edges);
    if (ticks != enc.reported_ticks) {
      const double pw = std::max(t - enc.last_tick_stamp, 1e-12);
      out.push_back({which, static_cast<int>(ticks - enc.reported_ticks), pw, t});
      enc.reported_ticks = ticks;
      enc.last_tick_stamp = t;
    }
  }
  enc.angle = b;
}

StepResult Simulator::step(double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("simulation step must be > 0");
  StepResult result;
  const int substeps = std::max(1, static_cast<int>(std::ceil(dt / config_.max_substep - 1e-9)));
  const double h = dt / substeps;
  const double r = config_.motor.wheel_radius;
  const double t_start = time_;

  for (int i = 0; i < substeps && !result.collision; ++i) {
    const double t0 = t_start + i * h;
    odometry::OdometryState s;
    s.pose = pose_;
    const bool moving = speeds_.left != 0.0 || speeds_.right != 0.0;
    if (!moving) continue;
    auto pose_at = [&](double frac) {
      return odometry::integrate_step(s, speeds_.left, speeds_.right, frac * h, config_.track_width).pose;
    };
    double frac = 1.0;
    Pose2D next = pose_at(1.0);
    if (collides(next)) {
      result.collision = true;
      double lo = 0.0, hi = 1.0;
      for (int it = 0; it < 50; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (collides(pose_at(mid))) {
          hi = mid;
        } else {
          lo = mid;
        }
      }
      frac = lo;
      next = lo > 0.0 ? pose_at(lo) : pose_;
    }
    const double t1 = t0 + frac * h;
    std::vector<drive::EncoderEvent> left, right;
    if (frac > 0.0) {
      advance_wheel(left_, drive::Wheel::kLeft, speeds_.left * frac * h / r, t0, t1, left);
      advance_wheel(right_, drive::Wheel::kRight, speeds_.right * frac * h / r, t0, t1, right);
    }
    std::merge(left.begin(), left.end(), right.begin(), right.end(), std::back_inserter(result.encoder),
               [](const auto& x, const auto& y) { return x.stamp < y.stamp; });
    pose_ = next;
  }
  time_ = t_start + dt;
  if (result.collision) ever_collided_ = true;

  if (time_ + 1e-9 >= next_scan_) {
    result.scan = scan_now();
    const double period = 1.0 / config_.scan.rate;
    while (next_scan_ <= time_ + 1e-9) next_scan_ += period;
  }
  return result;
}

LaserScan Simulator::scan_now() {
  LaserScan scan = raycast_scan(scenario_.world, pose_, config_.scan, &rng_);
  scan.stamp = time_;
  return scan;
}

std::vector<FaceDetection> Simulator::detect_faces() {
  return sim::detect_faces(scenario_.world, pose_, config_.face, &rng_);
}

}  // namespace eddie::sim

#include "eddie/sim/sensors.hpp"

#include <cmath>
#include <stdexcept>

namespace eddie::sim {
namespace {

LaserScan make_header(const ScanConfig& cfg, int beams) {
  LaserScan scan;
  scan.angle_min = -cfg.fov / 2.0;
  scan.angle_max = cfg.fov / 2.0;
  scan.angle_increment = beams > 1 ? cfg.fov / (beams - 1) : 0.0;
  scan.range_min = cfg.range_min;
  scan.range_max = cfg.range_max;
  scan.ranges.assign(static_cast<std::size_t>(beams), LaserScan::kNoReading);
  return scan;
}

std::vector<double> draw_noise(const ScanConfig& cfg, std::mt19937_64* rng) {
  std::vector<double> noise;
  if (cfg.noise_sigma > 0.0 && rng != nullptr) {
    std::normal_distribution<double> n(0.0, cfg.noise_sigma);
    noise.resize(static_cast<std::size_t>(cfg.beams));
    for (auto& v : noise) v = n(*rng);
  }
  return noise;
}

double finish_range(double hit, double noise, const ScanConfig& cfg) {
  if (!std::isfinite(hit)) return LaserScan::kNoReading;
  const double r = hit + noise;
  if (r > cfg.range_max) return LaserScan::kNoReading;
  return std::max(r, cfg.range_min);
}

}  // namespace

void ScanConfig::validate() const {
  if (!(fov > 0.0)) throw std::invalid_argument("scan fov must be > 0");
  if (beams < 1) throw std::invalid_argument("scan needs at least one beam");
  if (!(range_min >= 0.0 && range_min < range_max)) throw std::invalid_argument("scan needs 0 <= range_min < range_max");
  if (!(rate > 0.0)) throw std::invalid_argument("scan rate must be > 0");
  if (noise_sigma < 0.0) throw std::invalid_argument("scan noise must be >= 0");
}

LaserScan raycast_scan(const World& world, const Pose2D& sensor, const ScanConfig& cfg, std::mt19937_64* rng) {
  cfg.validate();
  LaserScan scan = make_header(cfg, cfg.beams);
  const std::vector<double> noise = draw_noise(cfg, rng);
  const std::vector<Circle> circles = world.solid_circles();
  const Point2 origin{sensor.x, sensor.y};
  const int n = cfg.beams;
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    const double hit = ray_distance(world, circles, origin, sensor.theta + scan.beam_angle(i), cfg.range_max);
    scan.ranges[i] = finish_range(hit, noise.empty() ? 0.0 : noise[i], cfg);
  }
  return scan;
}

LaserScan raycast_scan_serial(const World& world, const Pose2D& sensor, const ScanConfig& cfg, std::mt19937_64* rng) {
  cfg.validate();
  LaserScan scan = make_header(cfg, cfg.beams);
  const std::vector<double> noise = draw_noise(cfg, rng);
  const std::vector<Circle> circles = world.solid_circles();
  const Point2 origin{sensor.x, sensor.y};
  for (int i = 0; i < cfg.beams; ++i) {
    const double hit = ray_distance(world, circles, origin, sensor.theta + scan.beam_angle(i), cfg.range_max);
    scan.ranges[i] = finish_range(hit, noise.empty() ? 0.0 : noise[i], cfg);
  }
  return scan;
}

std::vector<FaceDetection> detect_faces(const World& world, const Pose2D& camera, const FaceConfig& cfg,
                                        std::mt19937_64* rng) {
  std::vector<FaceDetection> out;
  const double c = std::cos(camera.theta);
  const double s = std::sin(camera.theta);
  for (std::size_t i = 0; i < world.persons.size(); ++i) {
    const PersonBeacon& p = world.persons[i];
    const double dx = p.pose.x - camera.x;
    const double dy = p.pose.y - camera.y;
    const double range = std::hypot(dx, dy);
    if (range > cfg.max_range || range == 0.0) continue;
    const double bearing = std::atan2(dy, dx);
    if (std::abs(angle_diff(bearing, camera.theta)) > cfg.half_angle) continue;
    // The camera must sit inside the person's frontal cone.
    const double to_camera = std::atan2(-dy, -dx);
    if (std::abs(angle_diff(to_camera, p.pose.theta)) > cfg.frontal_half_angle) continue;
    // Occlusion by everything except this person's own body.
    World others = world;
    others.persons.erase(others.persons.begin() + static_cast<std::ptrdiff_t>(i));
    const double blocked = ray_distance(others, {camera.x, camera.y}, bearing, range);
    if (blocked < range - kPersonRadius) continue;
    out.push_back({p.id, c * dx + s * dy, -s * dx + c * dy, false});
  }
  if (cfg.false_positive_rate > 0.0 && rng != nullptr) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    if (u(*rng) < cfg.false_positive_rate) {
      const double r = 1.0 + u(*rng) * (cfg.max_range - 1.0);
      const double a = (2.0 * u(*rng) - 1.0) * cfg.half_angle;
      out.push_back({"phantom", r * std::cos(a), r * std::sin(a), true});
    }
  }
  return out;
}

}  // namespace eddie::sim

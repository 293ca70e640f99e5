#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "eddie/core/types.hpp"
#include "eddie/sim/world.hpp"

namespace eddie::sim {

// Kinect-like planar scan. The defaults are assumed values, not measured ones.
struct ScanConfig {
  double fov = 57.0 * kPi / 180.0;
  int beams = 640;
  double range_min = 0.45;
  double range_max = 4.0;
  double rate = 10.0;         // Hz
  double noise_sigma = 0.0;   // m

  void validate() const;
};

// Beam i at -fov/2 + i * fov/(beams - 1) relative to the sensor heading.
// Hits nearer than range_min are clamped to it; no hit within range_max
// gives LaserScan::kNoReading. `rng` is only drawn from when noise is on,
// serially and in beam order, so both kernels are bit-identical.
LaserScan raycast_scan(const World& world, const Pose2D& sensor, const ScanConfig& cfg, std::mt19937_64* rng = nullptr);
LaserScan raycast_scan_serial(const World& world, const Pose2D& sensor, const ScanConfig& cfg,
                              std::mt19937_64* rng = nullptr);

struct FaceConfig {
  double max_range = 3.0;
  double half_angle = 57.0 * kPi / 360.0;         // camera horizontal half fov
  double frontal_half_angle = 30.0 * kPi / 180.0;  // cone around the person's facing
  double false_positive_rate = 0.0;                // per call
};

struct FaceDetection {
  std::string person_id;
  double x = 0.0;  // camera frame, m
  double y = 0.0;
  bool false_positive = false;
};

// Face proxy: a person is seen iff within range, inside the camera fov,
// facing the camera within the frontal cone, and not occluded.
std::vector<FaceDetection> detect_faces(const World& world, const Pose2D& camera, const FaceConfig& cfg,
                                        std::mt19937_64* rng = nullptr);

}  // namespace eddie::sim

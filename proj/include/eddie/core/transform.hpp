#pragma once

#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "eddie/core/types.hpp"

namespace eddie {

class TransformError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Rigid planar transform with a fixed vertical offset: maps points expressed
// in `child` into `parent`.
struct Transform {
  std::string parent;
  std::string child;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double yaw = 0.0;

  static Transform identity(const std::string& frame) { return {frame, frame, 0.0, 0.0, 0.0, 0.0}; }
  static Transform from_pose(const std::string& parent, const std::string& child, const Pose2D& p) {
    return {parent, child, p.x, p.y, 0.0, p.theta};
  }
  Pose2D as_pose() const { return {x, y, yaw}; }
};

// a maps child(a) -> parent(a), b maps child(b) -> parent(b); requires
// a.child == b.parent. Result maps child(b) -> parent(a).
Transform compose(const Transform& a, const Transform& b);
Transform inverse(const Transform& t);
Pose2D apply(const Transform& t, const Pose2D& p);

inline constexpr const char* kOdomFrame = "odom";
inline constexpr const char* kBaseFrame = "base_link";
inline constexpr const char* kCameraFrame = "camera_link";

// Acyclic frame tree rooted at "odom". Each non-root frame has exactly one
// parent edge; setting an existing edge replaces it.
class TransformTree {
 public:
  explicit TransformTree(std::string root = kOdomFrame);
  TransformTree(const TransformTree& other);
  TransformTree& operator=(const TransformTree& other);

  void set(const Transform& t);
  bool has_frame(const std::string& frame) const;
  Transform lookup(const std::string& parent, const std::string& child) const;

  // The robot's fixed frames: odom -> base_link (from odometry) and
  // base_link -> camera_link 1.0 m above the base.
  static TransformTree robot_default(double camera_height = 1.0);

 private:
  std::vector<Transform> chain_to_root(const std::string& frame) const;

  std::string root_;
  std::map<std::string, Transform> parent_edge_;  // keyed by child frame
  mutable std::mutex mutex_;
};

}  // namespace eddie

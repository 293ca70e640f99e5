#include "eddie/core/transform.hpp"

#include <algorithm>
#include <cmath>

namespace eddie {

Transform compose(const Transform& a, const Transform& b) {
  if (a.child != b.parent) {
    throw TransformError("cannot compose " + a.parent + "->" + a.child + " with " + b.parent + "->" + b.child);
  }
  const double c = std::cos(a.yaw);
  const double s = std::sin(a.yaw);
  Transform out;
  out.parent = a.parent;
  out.child = b.child;
  out.x = a.x + c * b.x - s * b.y;
  out.y = a.y + s * b.x + c * b.y;
  out.z = a.z + b.z;
  out.yaw = normalize_angle(a.yaw + b.yaw);
  return out;
}

Transform inverse(const Transform& t) {
  const double c = std::cos(t.yaw);
  const double s = std::sin(t.yaw);
  Transform out;
  out.parent = t.child;
  out.child = t.parent;
  out.x = -(c * t.x + s * t.y);
  out.y = -(-s * t.x + c * t.y);
  out.z = -t.z;
  out.yaw = normalize_angle(-t.yaw);
  return out;
}

Pose2D apply(const Transform& t, const Pose2D& p) {
  const double c = std::cos(t.yaw);
  const double s = std::sin(t.yaw);
  return {t.x + c * p.x - s * p.y, t.y + s * p.x + c * p.y, t.yaw + p.theta};
}

TransformTree::TransformTree(std::string root) : root_(std::move(root)) {}

TransformTree::TransformTree(const TransformTree& other) {
  std::lock_guard lock(other.mutex_);
  root_ = other.root_;
  parent_edge_ = other.parent_edge_;
}

TransformTree& TransformTree::operator=(const TransformTree& other) {
  if (this == &other) return *this;
  std::scoped_lock lock(mutex_, other.mutex_);
  root_ = other.root_;
  parent_edge_ = other.parent_edge_;
  return *this;
}

void TransformTree::set(const Transform& t) {
  std::lock_guard lock(mutex_);
  if (t.child == root_) throw TransformError("root frame '" + root_ + "' cannot have a parent");
  if (t.child == t.parent) throw TransformError("self-loop on frame '" + t.child + "'");
  // Reject edges that would close a cycle: walk up from the new parent.
  std::string cursor = t.parent;
  while (cursor != root_) {
    if (cursor == t.child) throw TransformError("edge " + t.parent + "->" + t.child + " creates a cycle");
    auto it = parent_edge_.find(cursor);
    if (it == parent_edge_.end()) break;
    cursor = it->second.parent;
  }
  parent_edge_[t.child] = t;
}

bool TransformTree::has_frame(const std::string& frame) const {
  std::lock_guard lock(mutex_);
  if (frame == root_) return true;
  if (parent_edge_.count(frame)) return true;
  return std::any_of(parent_edge_.begin(), parent_edge_.end(),
                     [&](const auto& kv) { return kv.second.parent == frame; });
}

// Edges from `frame` up to the root, nearest first. Throws if the chain does
// not reach the root.
std::vector<Transform> TransformTree::chain_to_root(const std::string& frame) const {
  std::vector<Transform> chain;
  std::string cursor = frame;
  while (cursor != root_) {
    auto it = parent_edge_.find(cursor);
    if (it == parent_edge_.end()) throw TransformError("frame '" + frame + "' is not connected to '" + root_ + "'");
    chain.push_back(it->second);
    cursor = it->second.parent;
  }
  return chain;
}

Transform TransformTree::lookup(const std::string& parent, const std::string& child) const {
  std::lock_guard lock(mutex_);
  auto root_to = [&](const std::string& frame) {
    Transform acc = Transform::identity(root_);
    auto chain = chain_to_root(frame);
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) acc = compose(acc, *it);
    return acc;
  };
  auto known = [&](const std::string& f) {
    if (f == root_ || parent_edge_.count(f)) return true;
    return std::any_of(parent_edge_.begin(), parent_edge_.end(),
                       [&](const auto& kv) { return kv.second.parent == f; });
  };
  if (!known(parent)) throw TransformError("unknown frame '" + parent + "'");
  if (!known(child)) throw TransformError("unknown frame '" + child + "'");
  if (parent == child) return Transform::identity(parent);

  Transform root_parent = root_to(parent);
  Transform root_child = root_to(child);
  return compose(inverse(root_parent), root_child);
}

TransformTree TransformTree::robot_default(double camera_height) {
  TransformTree tree(kOdomFrame);
  tree.set({kOdomFrame, kBaseFrame, 0.0, 0.0, 0.0, 0.0});
  tree.set({kBaseFrame, kCameraFrame, 0.0, 0.0, camera_height, 0.0});
  return tree;
}

}  // namespace eddie

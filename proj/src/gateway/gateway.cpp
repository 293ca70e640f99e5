#include "eddie/gateway/gateway.hpp"

#include <spdlog/spdlog.h>

#include <type_traits>

namespace eddie::gateway {

using system::RobotSystem;

GatewayCore::GatewayCore(RobotSystem& sys, GatewayConfig config) : system_(sys), config_(config) {
  auto& bus = sys.bus();
  cmd_sub_ = bus.subscribe<Twist>(system::kCmdVelTopic);
  scan_sub_ = bus.subscribe<LaserScan>(system::kScanTopic);
  map_sub_ = bus.subscribe<TriStateMap>(system::kMapTopic);
  plan_sub_ = bus.subscribe<nav::Plan>(system::kPlanTopic);
  status_sub_ = bus.subscribe<nav::NavStatus>(system::kNavStatusTopic);
  pose_sub_ = bus.subscribe<Pose2D>(system::kPoseTopic);
  photo_sub_ = bus.subscribe<behaviors::PhotoRecord>(behaviors::kPhotoEventTopic);
}

std::vector<std::string> GatewayCore::on_connect(ClientId id, double wall) {
  clients_[id] = Client{wall, false};
  std::vector<std::string> out;
  out.push_back(envelope("hello", {{"protocol", kProtocolVersion},
                                   {"heartbeat_interval", config_.heartbeat_interval},
                                   {"client", id}}));
  if (last_map_) out.push_back(envelope("map", encode_map(*last_map_, last_map_stamp_)));
  out.push_back(envelope("pose", encode_pose(system_.pose_estimate(), system_.time())));
  return out;
}

std::vector<std::string> GatewayCore::on_message(ClientId id, std::string_view text, double wall) {
  auto it = clients_.find(id);
  if (it == clients_.end()) return {};
  Client& c = it->second;
  Inbound msg;
  try {
    msg = decode_inbound(text);
  } catch (const ProtocolError& e) {
    return {envelope("error", {{"message", e.what()}})};
  }
  std::visit(
      [&](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, HeartbeatMsg>) {
          c.last_seen = wall;
        } else if constexpr (std::is_same_v<M, KeyMsg>) {
          c.last_seen = wall;
          c.teleop_held = m.key != 's';
          system_.bus().publish(behaviors::kKeysTopic, std::string(1, m.key));
        } else if constexpr (std::is_same_v<M, GoalMsg>) {
          system_.bus().publish(system::kGoalTopic, m.goal);
        } else if constexpr (std::is_same_v<M, ExploreMsg>) {
          system_.start_exploration();
        } else if constexpr (std::is_same_v<M, StopMsg>) {
          c.teleop_held = false;
          system_.stop();
        }
      },
      msg);
  return {};
}

void GatewayCore::release(ClientId id, Client& c, double wall, bool disconnected) {
  c.teleop_held = false;
  // Zero the command stream now; the stop key keeps the next tick at zero.
  system_.bus().publish(system::kCmdVelTopic, Twist{});
  system_.bus().publish(behaviors::kKeysTopic, std::string("s"));
  stops_.push_back({id, wall, c.last_seen, disconnected});
  spdlog::warn("dead-man stop for client {} ({}), {:.3f} s after its last heartbeat", id,
               disconnected ? "disconnected" : "heartbeat timeout", wall - c.last_seen);
}

void GatewayCore::on_disconnect(ClientId id, double wall) {
  auto it = clients_.find(id);
  if (it == clients_.end()) return;
  if (it->second.teleop_held) release(id, it->second, wall, true);
  clients_.erase(it);
}

void GatewayCore::check_deadman(double wall) {
  for (auto& [id, c] : clients_)
    if (c.teleop_held && wall - c.last_seen >= config_.deadline()) release(id, c, wall, false);
}

bool GatewayCore::teleop_held(ClientId id) const {
  auto it = clients_.find(id);
  return it != clients_.end() && it->second.teleop_held;
}

std::vector<std::string> GatewayCore::collect_outbound() {
  std::vector<std::string> out;
  const double now = system_.time();
  for (const auto& cmd : cmd_sub_.drain()) out.push_back(envelope("cmd_vel", encode_twist(cmd, now)));
  for (const auto& s : status_sub_.drain()) out.push_back(envelope("nav_status", encode_nav_status(s)));
  for (const auto& p : plan_sub_.drain()) out.push_back(envelope("path", encode_path(p, now)));
  for (const auto& r : photo_sub_.drain()) out.push_back(envelope("photo_event", encode_photo_event(r)));
  if (auto pose = pose_sub_.latest()) {
    last_pose_ = *pose;
    out.push_back(envelope("pose", encode_pose(*pose, now)));
  }
  if (auto scan = scan_sub_.latest()) out.push_back(envelope("scan", encode_scan(*scan, last_pose_)));
  if (auto map = map_sub_.latest()) {
    const bool small = map->width() <= kFullMapLimit && map->height() <= kFullMapLimit;
    Json data = nullptr;
    if (!small && last_map_) data = encode_map_tiles(*last_map_, *map, now);
    if (data.is_null()) data = encode_map(*map, now);
    out.push_back(envelope("map", data));
    last_map_ = std::move(*map);
    last_map_stamp_ = now;
  }
  return out;
}

}  // namespace eddie::gateway

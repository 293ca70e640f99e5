#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "eddie/gateway/protocol.hpp"
#include "eddie/system/robot_system.hpp"

namespace eddie::gateway {

using ClientId = std::uint64_t;

struct GatewayConfig {
  // Clients send a heartbeat at least every half interval. A held teleop key
  // is released when no heartbeat or key has arrived for deadman_fraction of
  // an interval, so the stop lands inside one interval of the loss once the
  // check period is added.
  double heartbeat_interval = 0.5;  // s, wall clock
  double deadman_fraction = 0.9;
  double check_period = 0.025;      // s, how often the server runs check_deadman

  double deadline() const { return heartbeat_interval * deadman_fraction; }
};

struct DeadmanStop {
  ClientId client = 0;
  double wall = 0.0;      // when the stop was issued
  double last_seen = 0.0; // last heartbeat or key from that client
  bool disconnected = false;
};

// Protocol handling between websocket clients and a RobotSystem, free of any
// transport. Times are wall-clock seconds supplied by the caller. Not
// thread-safe: the server drives it from one thread.
class GatewayCore {
 public:
  GatewayCore(system::RobotSystem& system, GatewayConfig config);

  // Messages to send to the new client: hello, then the latest map and pose.
  std::vector<std::string> on_connect(ClientId id, double wall);
  // Replies to the sender (errors only); commands go to the system.
  std::vector<std::string> on_message(ClientId id, std::string_view text, double wall);
  void on_disconnect(ClientId id, double wall);
  // Releases held teleop keys whose heartbeats stopped.
  void check_deadman(double wall);

  // Everything the system published since the last call, as envelopes for
  // every client.
  std::vector<std::string> collect_outbound();

  const std::vector<DeadmanStop>& deadman_stops() const { return stops_; }
  const GatewayConfig& config() const { return config_; }
  std::size_t clients() const { return clients_.size(); }
  bool teleop_held(ClientId id) const;

 private:
  struct Client {
    double last_seen = 0.0;
    bool teleop_held = false;
  };
  void release(ClientId id, Client& c, double wall, bool disconnected);

  system::RobotSystem& system_;
  GatewayConfig config_;
  std::map<ClientId, Client> clients_;
  std::vector<DeadmanStop> stops_;
  Subscription<Twist> cmd_sub_;
  Subscription<LaserScan> scan_sub_;
  Subscription<TriStateMap> map_sub_;
  Subscription<nav::Plan> plan_sub_;
  Subscription<nav::NavStatus> status_sub_;
  Subscription<Pose2D> pose_sub_;
  Subscription<behaviors::PhotoRecord> photo_sub_;
  std::optional<TriStateMap> last_map_;
  double last_map_stamp_ = 0.0;
  Pose2D last_pose_;
};

}  // namespace eddie::gateway

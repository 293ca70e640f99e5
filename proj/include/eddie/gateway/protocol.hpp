#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

#include "eddie/behaviors/behavior.hpp"
#include "eddie/core/grid.hpp"
#include "eddie/core/types.hpp"
#include "eddie/nav/global_planner.hpp"
#include "eddie/nav/navigator.hpp"
#include "json.hpp"

// Wire format: one JSON object per websocket text frame, {"topic", "data"}.
// PROTOCOL.md is the reference for every schema here.
namespace eddie::gateway {

using Json = nlohmann::json;

inline constexpr int kProtocolVersion = 1;
// Maps up to this many cells per side go out whole; larger ones as tiles.
inline constexpr int kFullMapLimit = 256;
inline constexpr int kMapTile = 64;

class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string envelope(std::string_view topic, const Json& data);

// Outbound encoders return the `data` object.
Json encode_pose(const Pose2D& pose, double stamp);
Json encode_twist(const Twist& cmd, double stamp);
Json encode_path(const nav::Plan& plan, double stamp);
Json encode_scan(const LaserScan& scan, const Pose2D& pose);
Json encode_nav_status(const nav::NavStatus& status);
Json encode_photo_event(const behaviors::PhotoRecord& rec);
// Cell values: -1 unknown, 0 free, 100 occupied; row-major from the origin
// cell, x fastest.
Json encode_map(const TriStateMap& map, double stamp);
// Tiles of kMapTile cells (clipped at the edges) that differ from `prev`.
// Null when the geometry changed and a whole map is needed.
Json encode_map_tiles(const TriStateMap& prev, const TriStateMap& cur, double stamp);

// Applies a map message (either encoding) to `map`. A tiled update needs a
// map of matching geometry already in place.
void apply_map(TriStateMap& map, const Json& data);
Pose2D decode_pose(const Json& data);

// Client to server.
struct GoalMsg {
  Pose2D goal;
};
struct KeyMsg {
  char key = 's';
};
struct HeartbeatMsg {};
struct ExploreMsg {};
struct StopMsg {};
using Inbound = std::variant<GoalMsg, KeyMsg, HeartbeatMsg, ExploreMsg, StopMsg>;

// Throws ProtocolError naming what was wrong.
Inbound decode_inbound(std::string_view text);

}  // namespace eddie::gateway

#include "eddie/gateway/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace eddie::gateway {
namespace {

int cell_value(CellState s) {
  switch (s) {
    case CellState::kFree:
      return 0;
    case CellState::kOccupied:
      return 100;
    case CellState::kUnknown:
      return -1;
  }
  return -1;
}

CellState cell_state(const Json& v) {
  if (!v.is_number_integer()) throw ProtocolError("map cell must be an integer");
  switch (v.get<int>()) {
    case 0:
      return CellState::kFree;
    case 100:
      return CellState::kOccupied;
    case -1:
      return CellState::kUnknown;
    default:
      throw ProtocolError("map cell must be -1, 0 or 100");
  }
}

Json pose_json(const Pose2D& p) { return {{"x", p.x}, {"y", p.y}, {"theta", p.theta}}; }

Json geometry_json(const GridGeometry& g) {
  return {{"width", g.width}, {"height", g.height}, {"resolution", g.resolution}, {"origin", pose_json(g.origin)}};
}

GridGeometry geometry_from(const Json& d) {
  GridGeometry g;
  g.width = d.at("width").get<int>();
  g.height = d.at("height").get<int>();
  g.resolution = d.at("resolution").get<double>();
  g.origin = decode_pose(d.at("origin"));
  return g;
}

double number(const Json& obj, const char* key) {
  if (!obj.contains(key) || !obj[key].is_number()) throw ProtocolError(std::string("missing numeric field '") + key + "'");
  const double v = obj[key].get<double>();
  if (!std::isfinite(v)) throw ProtocolError(std::string("field '") + key + "' must be finite");
  return v;
}

}  // namespace

std::string envelope(std::string_view topic, const Json& data) {
  return Json{{"topic", topic}, {"data", data}}.dump();
}

Json encode_pose(const Pose2D& pose, double stamp) {
  Json j = pose_json(pose);
  j["stamp"] = stamp;
  return j;
}

Json encode_twist(const Twist& cmd, double stamp) {
  return {{"linear", cmd.linear}, {"angular", cmd.angular}, {"stamp", stamp}};
}

Json encode_path(const nav::Plan& plan, double stamp) {
  Json poses = Json::array();
  for (const auto& p : plan.poses) poses.push_back(pose_json(p));
  return {{"poses", poses}, {"cost", plan.cost}, {"stamp", stamp}};
}

Json encode_scan(const LaserScan& scan, const Pose2D& pose) {
  Json ranges = Json::array();
  for (double r : scan.ranges) ranges.push_back(LaserScan::is_reading(r) ? Json(r) : Json(nullptr));
  return {{"angle_min", scan.angle_min},
          {"angle_max", scan.angle_max},
          {"angle_increment", scan.angle_increment},
          {"range_min", scan.range_min},
          {"range_max", scan.range_max},
          {"ranges", ranges},
          {"pose", pose_json(pose)},
          {"stamp", scan.stamp}};
}

Json encode_nav_status(const nav::NavStatus& status) {
  return {{"state", nav::to_string(status.state)}, {"reason", status.reason}, {"stamp", status.stamp}};
}

Json encode_photo_event(const behaviors::PhotoRecord& rec) {
  return {{"sequence", rec.sequence},
          {"person_id", rec.person_id},
          {"stamp", rec.stamp},
          {"robot_pose", pose_json(rec.robot_pose)},
          {"person", {{"x", rec.person_position.x}, {"y", rec.person_position.y}}},
          {"snapshot", rec.snapshot.string()},
          {"record", rec.record.string()},
          {"saved", rec.saved},
          {"error", rec.error}};
}

Json encode_map(const TriStateMap& map, double stamp) {
  Json j = geometry_json(map.geometry);
  j["encoding"] = "full";
  j["stamp"] = stamp;
  std::vector<int> cells(map.data.size());
  std::transform(map.data.begin(), map.data.end(), cells.begin(), cell_value);
  j["data"] = std::move(cells);
  return j;
}

Json encode_map_tiles(const TriStateMap& prev, const TriStateMap& cur, double stamp) {
  if (!(prev.geometry == cur.geometry)) return nullptr;
  const GridGeometry& g = cur.geometry;
  Json tiles = Json::array();
  for (int ty = 0; ty < g.height; ty += kMapTile)
    for (int tx = 0; tx < g.width; tx += kMapTile) {
      const int w = std::min(kMapTile, g.width - tx), h = std::min(kMapTile, g.height - ty);
      bool changed = false;
      for (int y = ty; y < ty + h && !changed; ++y)
        for (int x = tx; x < tx + w; ++x)
          if (prev.at({x, y}) != cur.at({x, y})) {
            changed = true;
            break;
          }
      if (!changed) continue;
      std::vector<int> cells;
      cells.reserve(static_cast<std::size_t>(w) * h);
      for (int y = ty; y < ty + h; ++y)
        for (int x = tx; x < tx + w; ++x) cells.push_back(cell_value(cur.at({x, y})));
      tiles.push_back({{"x", tx}, {"y", ty}, {"width", w}, {"height", h}, {"data", std::move(cells)}});
    }
  Json j = geometry_json(g);
  j["encoding"] = "tiles";
  j["stamp"] = stamp;
  j["tiles"] = std::move(tiles);
  return j;
}

void apply_map(TriStateMap& map, const Json& data) {
  try {
    const GridGeometry g = geometry_from(data);
    const std::string enc = data.at("encoding").get<std::string>();
    if (enc == "full") {
      const Json& cells = data.at("data");
      if (!cells.is_array() || cells.size() != g.size()) throw ProtocolError("map data size does not match width*height");
      TriStateMap out(g, CellState::kUnknown);
      for (std::size_t i = 0; i < g.size(); ++i) out.data[i] = cell_state(cells[i]);
      map = std::move(out);
    } else if (enc == "tiles") {
      if (!(map.geometry == g)) throw ProtocolError("tiled map update without a matching base map");
      for (const auto& t : data.at("tiles")) {
        const int tx = t.at("x").get<int>(), ty = t.at("y").get<int>();
        const int w = t.at("width").get<int>(), h = t.at("height").get<int>();
        const Json& cells = t.at("data");
        if (tx < 0 || ty < 0 || w < 0 || h < 0 || tx + w > g.width || ty + h > g.height ||
            cells.size() != static_cast<std::size_t>(w) * h)
          throw ProtocolError("map tile out of bounds");
        std::size_t k = 0;
        for (int y = ty; y < ty + h; ++y)
          for (int x = tx; x < tx + w; ++x) map.at({x, y}) = cell_state(cells[k++]);
      }
    } else {
      throw ProtocolError("unknown map encoding '" + enc + "'");
    }
  } catch (const Json::exception& e) {
    throw ProtocolError(std::string("malformed map: ") + e.what());
  }
}

Pose2D decode_pose(const Json& data) {
  if (!data.is_object()) throw ProtocolError("pose must be an object");
  return Pose2D(number(data, "x"), number(data, "y"), data.contains("theta") ? number(data, "theta") : 0.0);
}

Inbound decode_inbound(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error&) {
    throw ProtocolError("invalid JSON");
  }
  if (!j.is_object() || !j.contains("topic") || !j["topic"].is_string())
    throw ProtocolError("message must be an object with a string 'topic'");
  const std::string topic = j["topic"].get<std::string>();
  const Json data = j.value("data", Json::object());
  if (topic == "goal") return GoalMsg{decode_pose(data)};
  if (topic == "key") {
    if (!data.contains("key") || !data["key"].is_string()) throw ProtocolError("key message needs a string 'key'");
    const std::string k = data["key"].get<std::string>();
    if (k.size() != 1 || std::string_view("wxads").find(k[0]) == std::string_view::npos)
      throw ProtocolError("unmapped key '" + k + "'");
    return KeyMsg{k[0]};
  }
  if (topic == "heartbeat") return HeartbeatMsg{};
  if (topic == "explore") return ExploreMsg{};
  if (topic == "stop") return StopMsg{};
  throw ProtocolError("unknown topic '" + topic + "'");
}

}  // namespace eddie::gateway

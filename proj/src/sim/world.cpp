#include "eddie/sim/world.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace eddie::sim {
namespace {

using nlohmann::json;

double number(const json& obj, const char* key, const std::string& locus) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw ScenarioError(locus, std::string("missing field '") + key + "'");
  if (!it->is_number()) throw ScenarioError(locus, std::string("field '") + key + "' must be a number");
  return it->get<double>();
}

Pose2D pose_from(const json& obj, const std::string& locus) {
  if (!obj.is_object()) throw ScenarioError(locus, "expected an object");
  return Pose2D(number(obj, "x", locus), number(obj, "y", locus), obj.contains("theta") ? number(obj, "theta", locus) : 0.0);
}

Rect rect_from(const json& obj, const std::string& locus) {
  Rect r{number(obj, "min_x", locus), number(obj, "min_y", locus), number(obj, "max_x", locus),
         number(obj, "max_y", locus)};
  if (!(r.min_x < r.max_x && r.min_y < r.max_y)) throw ScenarioError(locus, "rectangle needs min < max");
  return r;
}

bool rect_inside(const Rect& inner, const Rect& outer) {
  return inner.min_x >= outer.min_x && inner.max_x <= outer.max_x && inner.min_y >= outer.min_y &&
         inner.max_y <= outer.max_y;
}

// Slab test; returns entry distance or +inf. Origin inside gives 0.
double ray_rect(const Rect& r, Point2 o, double dx, double dy) {
  double t0 = 0.0;
  double t1 = std::numeric_limits<double>::infinity();
  const double lo[2] = {r.min_x, r.min_y};
  const double hi[2] = {r.max_x, r.max_y};
  const double org[2] = {o.x, o.y};
  const double dir[2] = {dx, dy};
  for (int axis = 0; axis < 2; ++axis) {
    if (dir[axis] == 0.0) {
      if (org[axis] < lo[axis] || org[axis] > hi[axis]) return std::numeric_limits<double>::infinity();
      continue;
    }
    double a = (lo[axis] - org[axis]) / dir[axis];
    double b = (hi[axis] - org[axis]) / dir[axis];
    if (a > b) std::swap(a, b);
    t0 = std::max(t0, a);
    t1 = std::min(t1, b);
    if (t0 > t1) return std::numeric_limits<double>::infinity();
  }
  return t0;
}

double ray_circle(const Circle& c, Point2 o, double dx, double dy) {
  const double fx = o.x - c.x;
  const double fy = o.y - c.y;
  const double cc = fx * fx + fy * fy - c.radius * c.radius;
  if (cc <= 0.0) return 0.0;
  const double b = fx * dx + fy * dy;
  const double disc = b * b - cc;
  if (disc < 0.0 || b > 0.0) return std::numeric_limits<double>::infinity();
  // Numerically stable near root: cc / (-b + sqrt(disc)).
  return cc / (-b + std::sqrt(disc));
}

bool polygon_hits_rect(const Polygon& poly, const Rect& r) {
  for (const auto& p : poly)
    if (r.contains(p)) return true;
  const Point2 corners[4] = {{r.min_x, r.min_y}, {r.max_x, r.min_y}, {r.max_x, r.max_y}, {r.min_x, r.max_y}};
  for (const auto& c : corners)
    if (polygon_contains(poly, c)) return true;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Point2 a = poly[i];
    const Point2 b = poly[(i + 1) % poly.size()];
    for (int k = 0; k < 4; ++k)
      if (segments_intersect(a, b, corners[k], corners[(k + 1) % 4])) return true;
  }
  return false;
}

bool polygon_hits_circle(const Polygon& poly, const Circle& c) {
  if (polygon_contains(poly, {c.x, c.y})) return true;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    if (point_segment_distance({c.x, c.y}, poly[i], poly[(i + 1) % poly.size()]) <= c.radius) return true;
  }
  return false;
}

bool circle_hits_rect(const Circle& c, const Rect& r) {
  const double nx = std::clamp(c.x, r.min_x, r.max_x);
  const double ny = std::clamp(c.y, r.min_y, r.max_y);
  return std::hypot(c.x - nx, c.y - ny) <= c.radius;
}

}  // namespace

std::vector<Circle> World::solid_circles() const {
  std::vector<Circle> out = circles;
  for (const auto& p : persons) out.push_back({p.pose.x, p.pose.y, kPersonRadius});
  return out;
}

void add_boundary_walls(World& world, double t) {
  if (t <= 0.0) return;
  const Rect& b = world.bounds;
  world.rects.push_back({b.min_x, b.min_y, b.max_x, b.min_y + t});
  world.rects.push_back({b.min_x, b.max_y - t, b.max_x, b.max_y});
  world.rects.push_back({b.min_x, b.min_y, b.min_x + t, b.max_y});
  world.rects.push_back({b.max_x - t, b.min_y, b.max_x, b.max_y});
}

void validate_world(const World& world) {
  const Rect& b = world.bounds;
  if (!(b.min_x < b.max_x && b.min_y < b.max_y)) throw ScenarioError("bounds", "bounds need min < max");
  for (std::size_t i = 0; i < world.rects.size(); ++i) {
    if (!rect_inside(world.rects[i], b)) throw ScenarioError("rects[" + std::to_string(i) + "]", "outside bounds");
  }
  for (std::size_t i = 0; i < world.circles.size(); ++i) {
    const Circle& c = world.circles[i];
    const std::string locus = "circles[" + std::to_string(i) + "]";
    if (!(c.radius > 0.0)) throw ScenarioError(locus, "radius must be > 0");
    if (!rect_inside({c.x - c.radius, c.y - c.radius, c.x + c.radius, c.y + c.radius}, b))
      throw ScenarioError(locus, "outside bounds");
  }
  for (std::size_t i = 0; i < world.persons.size(); ++i) {
    const auto& p = world.persons[i];
    const std::string locus = "persons[" + std::to_string(i) + "] '" + p.id + "'";
    const Circle body{p.pose.x, p.pose.y, kPersonRadius};
    if (!rect_inside({body.x - body.radius, body.y - body.radius, body.x + body.radius, body.y + body.radius}, b))
      throw ScenarioError(locus, "outside bounds");
    for (const auto& r : world.rects)
      if (circle_hits_rect(body, r)) throw ScenarioError(locus, "inside an obstacle");
    for (const auto& c : world.circles)
      if (std::hypot(c.x - body.x, c.y - body.y) <= c.radius + body.radius)
        throw ScenarioError(locus, "inside an obstacle");
    for (std::size_t j = 0; j < i; ++j)
      if (world.persons[j].id == p.id) throw ScenarioError(locus, "duplicate person id");
  }
}

Scenario parse_scenario(const std::string& json_text, const std::string& name) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ScenarioError(name + " byte " + std::to_string(e.byte), "malformed JSON");
  }
  if (!doc.is_object()) throw ScenarioError(name, "top level must be an object");

  Scenario s;
  s.name = doc.value("name", name);
  if (!doc.contains("bounds")) throw ScenarioError("bounds", "missing");
  s.world.bounds = rect_from(doc["bounds"], "bounds");
  add_boundary_walls(s.world, doc.contains("wall_thickness") ? number(doc, "wall_thickness", name) : 0.1);

  if (doc.contains("obstacles")) {
    const auto& obstacles = doc["obstacles"];
    if (!obstacles.is_array()) throw ScenarioError("obstacles", "must be an array");
    for (std::size_t i = 0; i < obstacles.size(); ++i) {
      const std::string locus = "obstacles[" + std::to_string(i) + "]";
      const auto& o = obstacles[i];
      const std::string type = o.is_object() ? o.value("type", "") : "";
      if (type == "rect") {
        const Rect r = rect_from(o, locus);
        if (!rect_inside(r, s.world.bounds)) throw ScenarioError(locus, "outside bounds");
        s.world.rects.push_back(r);
      } else if (type == "circle") {
        const Circle c{number(o, "x", locus), number(o, "y", locus), number(o, "radius", locus)};
        s.world.circles.push_back(c);
      } else {
        throw ScenarioError(locus, "type must be \"rect\" or \"circle\"");
      }
    }
  }
  if (doc.contains("persons")) {
    const auto& persons = doc["persons"];
    if (!persons.is_array()) throw ScenarioError("persons", "must be an array");
    for (std::size_t i = 0; i < persons.size(); ++i) {
      const std::string locus = "persons[" + std::to_string(i) + "]";
      const auto& p = persons[i];
      if (!p.is_object() || !p.contains("id") || !p["id"].is_string()) throw ScenarioError(locus, "needs a string id");
      s.world.persons.push_back({p["id"].get<std::string>(), pose_from(p, locus)});
    }
  }
  if (!doc.contains("robot_start")) throw ScenarioError("robot_start", "missing");
  s.robot_start = pose_from(doc["robot_start"], "robot_start");

  validate_world(s.world);
  if (!s.world.bounds.contains({s.robot_start.x, s.robot_start.y}) ||
      point_in_solid(s.world, {s.robot_start.x, s.robot_start.y}))
    throw ScenarioError("robot_start", "not in free space");
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError(path.string(), "cannot open scenario file");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path.stem().string());
}

double ray_distance(const World& world, const std::vector<Circle>& circles, Point2 origin, double angle,
                    double max_range) {
  const double dx = std::cos(angle);
  const double dy = std::sin(angle);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& r : world.rects) best = std::min(best, ray_rect(r, origin, dx, dy));
  for (const auto& c : circles) best = std::min(best, ray_circle(c, origin, dx, dy));
  return best <= max_range ? best : std::numeric_limits<double>::infinity();
}

double ray_distance(const World& world, Point2 origin, double angle, double max_range) {
  return ray_distance(world, world.solid_circles(), origin, angle, max_range);
}

bool polygon_hits_world(const World& world, const Polygon& poly) {
  for (const auto& r : world.rects)
    if (polygon_hits_rect(poly, r)) return true;
  for (const auto& c : world.solid_circles())
    if (polygon_hits_circle(poly, c)) return true;
  return false;
}

bool point_in_solid(const World& world, Point2 p) {
  for (const auto& r : world.rects)
    if (r.contains(p)) return true;
  for (const auto& c : world.solid_circles())
    if (std::hypot(p.x - c.x, p.y - c.y) <= c.radius) return true;
  return false;
}

TriStateMap rasterize(const World& world, double resolution) {
  const Rect& b = world.bounds;
  const int w = static_cast<int>(std::ceil((b.max_x - b.min_x) / resolution - 1e-9));
  const int h = static_cast<int>(std::ceil((b.max_y - b.min_y) / resolution - 1e-9));
  TriStateMap map(GridGeometry{resolution, w, h, Pose2D(b.min_x, b.min_y, 0.0)}, CellState::kFree);
  const auto circles = world.solid_circles();
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double x0 = b.min_x + x * resolution, x1 = x0 + resolution;
      const double y0 = b.min_y + y * resolution, y1 = y0 + resolution;
      bool hit = false;
      for (const auto& r : world.rects)
        if (r.min_x < x1 && r.max_x > x0 && r.min_y < y1 && r.max_y > y0) hit = true;
      for (const auto& c : circles) {
        const double px = std::clamp(c.x, x0, x1), py = std::clamp(c.y, y0, y1);
        if (std::hypot(px - c.x, py - c.y) < c.radius) hit = true;
      }
      if (hit) map.at({x, y}) = CellState::kOccupied;
    }
  return map;
}

}  // namespace eddie::sim

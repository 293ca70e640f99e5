#pragma once

#include <filesystem>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "eddie/core/geometry.hpp"
#include "eddie/core/grid.hpp"
#include "eddie/core/types.hpp"

namespace eddie::sim {

struct Rect {
  double min_x = 0.0, min_y = 0.0, max_x = 0.0, max_y = 0.0;
  bool contains(Point2 p) const { return p.x >= min_x && p.x <= max_x && p.y >= min_y && p.y <= max_y; }
};

struct Circle {
  double x = 0.0, y = 0.0, radius = 0.0;
};

struct PersonBeacon {
  std::string id;
  Pose2D pose;  // theta is the facing direction
};

// Persons occupy a disc of this radius for collisions and line of sight.
inline constexpr double kPersonRadius = 0.2;

struct World {
  Rect bounds;
  std::vector<Rect> rects;  // includes generated boundary walls
  std::vector<Circle> circles;
  std::vector<PersonBeacon> persons;

  // Obstacles plus person bodies, the set every sensor and collision test sees.
  std::vector<Circle> solid_circles() const;
};

class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(const std::string& locus, const std::string& what)
      : std::runtime_error(locus + ": " + what), locus_(locus) {}
  const std::string& locus() const { return locus_; }

 private:
  std::string locus_;
};

struct Scenario {
  std::string name;
  World world;
  Pose2D robot_start;
};

// Adds four walls of `thickness` just inside the bounds.
void add_boundary_walls(World& world, double thickness);

// Throws ScenarioError naming the offending element.
void validate_world(const World& world);

Scenario parse_scenario(const std::string& json_text, const std::string& name = "scenario");
Scenario load_scenario(const std::filesystem::path& path);

// Distance along the ray to the first solid surface, or +inf beyond max_range.
double ray_distance(const World& world, Point2 origin, double angle, double max_range);

// Same test against a pre-flattened circle list (avoids rebuilding it per beam).
double ray_distance(const World& world, const std::vector<Circle>& circles, Point2 origin, double angle,
                    double max_range);

bool polygon_hits_world(const World& world, const Polygon& poly);

// True when the point lies inside some solid (including its boundary).
bool point_in_solid(const World& world, Point2 p);

// Ground-truth occupancy over the world bounds: a cell is occupied when its
// square overlaps a solid with positive area. Nothing is unknown.
TriStateMap rasterize(const World& world, double resolution);

}  // namespace eddie::sim

#pragma once

#include <vector>

#include "eddie/core/types.hpp"

namespace eddie {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point2&) const = default;
};

using Polygon = std::vector<Point2>;

// Distance from point p to segment [a, b].
double point_segment_distance(Point2 p, Point2 a, Point2 b);

// Even-odd containment; points on the boundary count as inside.
bool polygon_contains(const Polygon& poly, Point2 p);

// Simple = no two non-adjacent edges intersect.
bool polygon_is_simple(const Polygon& poly);

// Distance from the origin to the closest edge / farthest vertex.
double polygon_inscribed_radius(const Polygon& poly);
double polygon_circumscribed_radius(const Polygon& poly);

// Polygon vertices placed at a robot pose.
Polygon transform_polygon(const Polygon& poly, const Pose2D& pose);

bool segments_intersect(Point2 a, Point2 b, Point2 c, Point2 d);

}  // namespace eddie

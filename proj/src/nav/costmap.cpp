#include "eddie/nav/costmap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace eddie::nav {
namespace {

// Felzenszwalb-Huttenlocher 1D squared distance transform of f (length n).
void dt1d(const double* f, int n, double* out, int* v, double* z) {
  const double inf = std::numeric_limits<double>::infinity();
  auto meet = [&](int q, int p) { return ((f[q] + double(q) * q) - (f[p] + double(p) * p)) / (2.0 * (q - p)); };
  int k = 0;
  v[0] = 0;
  z[0] = -inf;
  z[1] = inf;
  for (int q = 1; q < n; ++q) {
    double s = meet(q, v[k]);
    while (s <= z[k]) {
      --k;
      s = meet(q, v[k]);
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = inf;
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    const double d = q - v[k];
    out[q] = d * d + f[v[k]];
  }
}

void apply_costs(Costmap& map, const std::vector<double>& sq, const InflationParams& p, bool parallel) {
  const double res2 = map.geometry.resolution * map.geometry.resolution;
  const double r_in2 = p.inscribed_radius * p.inscribed_radius + 1e-9;
  const double r_out2 = p.inflation_radius * p.inflation_radius + 1e-9;
  const long n = static_cast<long>(map.data.size());
  auto one = [&](long i) {
    const double s = sq[static_cast<std::size_t>(i)];
    if (s == 0.0) return;
    const double d2 = s * res2;
    if (d2 > r_out2) return;
    const std::uint8_t c = d2 <= r_in2 ? kInscribed : decay_cost(std::sqrt(d2), p);
    auto& cell = map.data[static_cast<std::size_t>(i)];
    cell = std::max(cell, c);
  };
  if (parallel) {
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) one(i);
  } else {
    for (long i = 0; i < n; ++i) one(i);
  }
}

// Squared cell distance to the nearest lethal cell.
std::vector<double> distance_transform(const Costmap& map, bool parallel) {
  const int w = map.geometry.width;
  const int h = map.geometry.height;
  // Larger than any in-grid squared distance yet exact in a double, so every
  // intermediate value stays an integer.
  const double far = 4.0 * (double(w) + h) * (double(w) + h) + 1.0;
  std::vector<double> grid(map.data.size());
  for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = map.data[i] == kLethal ? 0.0 : far;

  auto columns = [&](int x) {
    std::vector<double> f(h), out(h), z(h + 1);
    std::vector<int> v(h);
    for (int y = 0; y < h; ++y) f[y] = grid[static_cast<std::size_t>(y) * w + x];
    dt1d(f.data(), h, out.data(), v.data(), z.data());
    for (int y = 0; y < h; ++y) grid[static_cast<std::size_t>(y) * w + x] = out[y];
  };
  auto rows = [&](int y) {
    std::vector<double> f(w), out(w), z(w + 1);
    std::vector<int> v(w);
    double* row = grid.data() + static_cast<std::size_t>(y) * w;
    std::copy(row, row + w, f.begin());
    dt1d(f.data(), w, out.data(), v.data(), z.data());
    std::copy(out.begin(), out.end(), row);
  };
  if (parallel) {
#pragma omp parallel for schedule(static)
    for (int x = 0; x < w; ++x) columns(x);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y) rows(y);
  } else {
    for (int x = 0; x < w; ++x) columns(x);
    for (int y = 0; y < h; ++y) rows(y);
  }
  return grid;
}

void inflate_impl(Costmap& map, const InflationParams& p, bool parallel) {
  if (!(p.inflation_radius >= p.inscribed_radius)) throw std::invalid_argument("inflation radius below inscribed radius");
  if (map.data.empty()) return;
  const bool any_lethal = std::find(map.data.begin(), map.data.end(), kLethal) != map.data.end();
  if (!any_lethal) return;
  apply_costs(map, distance_transform(map, parallel), p, parallel);
}

}  // namespace

Footprint Footprint::from_polygon(Polygon poly) {
  if (poly.size() < 3 || !polygon_is_simple(poly) || !polygon_contains(poly, {0.0, 0.0}))
    throw std::invalid_argument("footprint must be a simple polygon containing the origin");
  Footprint f;
  f.inscribed_radius = polygon_inscribed_radius(poly);
  f.circumscribed_radius = polygon_circumscribed_radius(poly);
  f.polygon = std::move(poly);
  return f;
}

std::uint8_t decay_cost(double d, const InflationParams& p) {
  const double c = 252.0 * std::exp(-p.cost_scaling_factor * (d - p.inscribed_radius));
  return static_cast<std::uint8_t>(std::clamp(std::lround(c), 0L, 252L));
}

std::uint8_t inflation_cost(double d, const InflationParams& p) {
  if (d <= 0.0) return kLethal;
  if (d <= p.inscribed_radius + 1e-9) return kInscribed;
  if (d <= p.inflation_radius + 1e-9) return decay_cost(d, p);
  return kFreeSpace;
}

void inflate(Costmap& map, const InflationParams& p) { inflate_impl(map, p, true); }
void inflate_serial(Costmap& map, const InflationParams& p) { inflate_impl(map, p, false); }

Costmap build_costmap(const TriStateMap& map, const InflationParams& p) {
  Costmap out(map.geometry, kFreeSpace);
  for (std::size_t i = 0; i < map.data.size(); ++i)
    if (map.data[i] == CellState::kOccupied) out.data[i] = kLethal;
  inflate(out, p);
  return out;
}

Costmap build_local_costmap(const TriStateMap& map, const Pose2D& robot, double width, double height,
                            const InflationParams& p) {
  const double res = map.geometry.resolution;
  const int w = static_cast<int>(std::lround(width / res));
  const int h = static_cast<int>(std::lround(height / res));
  const int margin = static_cast<int>(std::ceil(p.inflation_radius / res)) + 1;
  const CellIndex rc = map.geometry.world_to_cell(robot.x, robot.y);
  const int x0 = rc.x - w / 2 - margin;
  const int y0 = rc.y - h / 2 - margin;

  GridGeometry ext{res, w + 2 * margin, h + 2 * margin,
                   Pose2D(map.geometry.origin.x + x0 * res, map.geometry.origin.y + y0 * res, 0.0)};
  Costmap big(ext, kFreeSpace);
  for (int y = 0; y < ext.height; ++y)
    for (int x = 0; x < ext.width; ++x) {
      const CellIndex src{x0 + x, y0 + y};
      if (map.geometry.contains(src) && map.at(src) == CellState::kOccupied) big.at({x, y}) = kLethal;
    }
  inflate(big, p);

  GridGeometry g{res, w, h, Pose2D(ext.origin.x + margin * res, ext.origin.y + margin * res, 0.0)};
  Costmap out(g, kFreeSpace);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) out.at({x, y}) = big.at({x + margin, y + margin});
  return out;
}

}  // namespace eddie::nav

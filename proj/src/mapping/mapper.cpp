#include "eddie/mapping/mapper.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace eddie::mapping {
namespace {

// Pushes endpoints slightly past the measured surface so a hit that lands
// exactly on a cell boundary is charged to the cell behind the surface.
constexpr double kEndpointNudge = 1e-6;

std::string shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& text, const std::string& locus) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) throw MapError(locus + ": bad number '" + text + "'");
  return v;
}

int parse_int(const std::string& text, const std::string& locus) {
  int v = 0;
  const char* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end || v < 0) throw MapError(locus + ": bad integer '" + text + "'");
  return v;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::filesystem::path sidecar(const std::filesystem::path& pgm) {
  auto p = pgm;
  p.replace_extension(".yaml");
  return p;
}

}  // namespace

void MapperConfig::validate() const {
  if (!(l_miss < 0.0 && 0.0 < l_hit)) throw std::invalid_argument("mapper needs l_miss < 0 < l_hit");
  if (!(l_min < 0.0 && 0.0 < l_max)) throw std::invalid_argument("mapper needs l_min < 0 < l_max");
  if (!(0.0 < free_threshold && free_threshold < occupied_threshold && occupied_threshold < 1.0))
    throw std::invalid_argument("mapper needs 0 < free threshold < occupied threshold < 1");
  if (!(resolution > 0.0)) throw std::invalid_argument("mapper resolution must be > 0");
  if (grow_margin < 0.0) throw std::invalid_argument("mapper grow margin must be >= 0");
}

double occupancy_probability(double l) { return 1.0 - 1.0 / (1.0 + std::exp(l)); }

std::vector<CellIndex> traverse(const GridGeometry& g, Point2 a, Point2 b) {
  const CellIndex start = g.world_to_cell(a.x, a.y);
  const CellIndex end = g.world_to_cell(b.x, b.y);
  std::vector<CellIndex> out;
  out.reserve(static_cast<std::size_t>(std::abs(end.x - start.x) + std::abs(end.y - start.y) + 1));
  out.push_back(start);
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const int sx = end.x > start.x ? 1 : (end.x < start.x ? -1 : 0);
  const int sy = end.y > start.y ? 1 : (end.y < start.y ? -1 : 0);
  const double inf = std::numeric_limits<double>::infinity();
  const double r = g.resolution;
  double t_max_x = inf, t_max_y = inf, t_dx = inf, t_dy = inf;
  if (sx != 0) {
    const double boundary = g.origin.x + (start.x + (sx > 0 ? 1 : 0)) * r;
    t_max_x = (boundary - a.x) / dx;
    t_dx = r / std::abs(dx);
  }
  if (sy != 0) {
    const double boundary = g.origin.y + (start.y + (sy > 0 ? 1 : 0)) * r;
    t_max_y = (boundary - a.y) / dy;
    t_dy = r / std::abs(dy);
  }
  CellIndex c = start;
  while (!(c == end)) {
    // Never step past the end column/row; floating error cannot derail the walk.
    const bool step_x = c.y == end.y || (c.x != end.x && t_max_x < t_max_y);
    if (step_x) {
      c.x += sx;
      t_max_x += t_dx;
    } else {
      c.y += sy;
      t_max_y += t_dy;
    }
    out.push_back(c);
  }
  return out;
}

GridGeometry grow_to_cover(const GridGeometry& g, Point2 lo, Point2 hi, double margin) {
  const double r = g.resolution;
  if (g.size() == 0) {
    GridGeometry out = g;
    const double ox = std::floor((lo.x - margin) / r) * r;
    const double oy = std::floor((lo.y - margin) / r) * r;
    out.origin = Pose2D(ox, oy, 0.0);
    out.width = static_cast<int>(std::ceil((hi.x + margin - ox) / r));
    out.height = static_cast<int>(std::ceil((hi.y + margin - oy) / r));
    return out;
  }
  if (lo.x >= g.origin.x && lo.y >= g.origin.y && hi.x < g.max_x() && hi.y < g.max_y()) return g;
  int add_left = 0, add_bottom = 0, add_right = 0, add_top = 0;
  if (lo.x < g.origin.x) add_left = static_cast<int>(std::ceil((g.origin.x - lo.x + margin) / r));
  if (lo.y < g.origin.y) add_bottom = static_cast<int>(std::ceil((g.origin.y - lo.y + margin) / r));
  if (hi.x >= g.max_x()) add_right = static_cast<int>(std::ceil((hi.x - g.max_x() + margin) / r)) + 1;
  if (hi.y >= g.max_y()) add_top = static_cast<int>(std::ceil((hi.y - g.max_y() + margin) / r)) + 1;
  GridGeometry out = g;
  out.origin = Pose2D(g.origin.x - add_left * r, g.origin.y - add_bottom * r, 0.0);
  out.width = g.width + add_left + add_right;
  out.height = g.height + add_bottom + add_top;
  return out;
}

void integrate_scan(OccupancyGrid& grid, const Pose2D& pose, const LaserScan& scan, const MapperConfig& cfg) {
  struct Beam {
    Point2 end;
    bool hit;
  };
  std::vector<Beam> beams;
  beams.reserve(scan.ranges.size());
  const Point2 origin{pose.x, pose.y};
  Point2 lo = origin, hi = origin;
  for (std::size_t i = 0; i < scan.ranges.size(); ++i) {
    const double range = scan.ranges[i];
    if (std::isnan(range)) continue;
    const bool hit = LaserScan::is_reading(range);
    if (hit && range <= scan.range_min) continue;
    const double len = hit ? range + kEndpointNudge : scan.range_max;
    const double a = pose.theta + scan.beam_angle(i);
    const Point2 end{origin.x + len * std::cos(a), origin.y + len * std::sin(a)};
    beams.push_back({end, hit});
    lo = {std::min(lo.x, end.x), std::min(lo.y, end.y)};
    hi = {std::max(hi.x, end.x), std::max(hi.y, end.y)};
  }
  if (beams.empty()) return;

  if (grid.geometry.size() == 0) grid.geometry.resolution = cfg.resolution;
  const GridGeometry grown = grow_to_cover(grid.geometry, lo, hi, cfg.grow_margin);
  if (!(grown == grid.geometry)) grid = regrid(grid, grown, 0.0);

  auto add = [&](CellIndex c, double delta) {
    double& l = grid.at(c);
    l = std::clamp(l + delta, cfg.l_min, cfg.l_max);
  };
  for (const Beam& b : beams) {
    const auto cells = traverse(grid.geometry, origin, b.end);
    const std::size_t n = cells.size();
    if (n < 2) continue;
    const std::size_t last_miss = b.hit ? n - 1 : n;
    for (std::size_t k = 1; k < last_miss; ++k) add(cells[k], cfg.l_miss);
    if (b.hit) add(cells[n - 1], cfg.l_hit);
  }
}

void clear_footprint(OccupancyGrid& grid, const Polygon& footprint, const MapperConfig& cfg) {
  if (footprint.empty() || grid.geometry.size() == 0) return;
  const GridGeometry& g = grid.geometry;
  double lo_x = footprint[0].x, hi_x = lo_x, lo_y = footprint[0].y, hi_y = lo_y;
  for (const auto& p : footprint) {
    lo_x = std::min(lo_x, p.x);
    hi_x = std::max(hi_x, p.x);
    lo_y = std::min(lo_y, p.y);
    hi_y = std::max(hi_y, p.y);
  }
  const CellIndex a = g.world_to_cell(lo_x, lo_y), b = g.world_to_cell(hi_x, hi_y);
  for (int y = std::max(a.y, 0); y <= std::min(b.y, g.height - 1); ++y)
    for (int x = std::max(a.x, 0); x <= std::min(b.x, g.width - 1); ++x) {
      if (!polygon_contains(footprint, {g.cell_center_x(x), g.cell_center_y(y)})) continue;
      double& l = grid.at({x, y});
      l = std::clamp(l + cfg.l_miss, cfg.l_min, cfg.l_max);
    }
}

TriStateMap to_tristate(const OccupancyGrid& grid, const MapperConfig& cfg) {
  TriStateMap out(grid.geometry, CellState::kUnknown);
  for (std::size_t i = 0; i < grid.data.size(); ++i) {
    const double p = occupancy_probability(grid.data[i]);
    if (p >= cfg.occupied_threshold) {
      out.data[i] = CellState::kOccupied;
    } else if (p <= cfg.free_threshold) {
      out.data[i] = CellState::kFree;
    }
  }
  return out;
}

OccupancyGrid from_tristate(const TriStateMap& map, const MapperConfig& cfg) {
  OccupancyGrid out(map.geometry, 0.0);
  for (std::size_t i = 0; i < map.data.size(); ++i) {
    if (map.data[i] == CellState::kOccupied) out.data[i] = cfg.l_max;
    if (map.data[i] == CellState::kFree) out.data[i] = cfg.l_min;
  }
  return out;
}

void save_map(const TriStateMap& map, const std::filesystem::path& pgm_path) {
  const GridGeometry& g = map.geometry;
  std::ofstream pgm(pgm_path, std::ios::binary);
  if (!pgm) throw MapError(pgm_path.string() + ": cannot open for writing");
  pgm << "P5\n" << g.width << ' ' << g.height << "\n255\n";
  std::string row(static_cast<std::size_t>(g.width), '\0');
  for (int y = g.height - 1; y >= 0; --y) {
    for (int x = 0; x < g.width; ++x) {
      const CellState s = map.data[g.index({x, y})];
      row[static_cast<std::size_t>(x)] = static_cast<char>(
          s == CellState::kOccupied ? kPgmOccupied : (s == CellState::kFree ? kPgmFree : kPgmUnknown));
    }
    pgm.write(row.data(), static_cast<std::streamsize>(row.size()));
  }
  if (!pgm) throw MapError(pgm_path.string() + ": write failed");

  std::ofstream yaml(sidecar(pgm_path));
  if (!yaml) throw MapError(sidecar(pgm_path).string() + ": cannot open for writing");
  yaml << "image: " << pgm_path.filename().string() << "\n"
       << "resolution: " << shortest(g.resolution) << "\n"
       << "origin: " << shortest(g.origin.x) << ' ' << shortest(g.origin.y) << ' ' << shortest(g.origin.theta) << "\n"
       << "width: " << g.width << "\n"
       << "height: " << g.height << "\n";
  if (!yaml) throw MapError(sidecar(pgm_path).string() + ": write failed");
}

TriStateMap load_map(const std::filesystem::path& pgm_path) {
  const auto yaml_path = sidecar(pgm_path);
  std::ifstream yaml(yaml_path);
  if (!yaml) throw MapError(yaml_path.string() + ": cannot open");
  std::map<std::string, std::pair<std::string, int>> fields;
  std::string line;
  for (int n = 1; std::getline(yaml, line); ++n) {
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos) throw MapError(yaml_path.string() + ":" + std::to_string(n) + ": expected 'key: value'");
    fields[trim(line.substr(0, colon))] = {trim(line.substr(colon + 1)), n};
  }
  auto field = [&](const std::string& key) -> std::pair<std::string, std::string> {
    const auto it = fields.find(key);
    if (it == fields.end()) throw MapError(yaml_path.string() + ": missing '" + key + "'");
    return {it->second.first, yaml_path.string() + ":" + std::to_string(it->second.second)};
  };

  GridGeometry g;
  {
    const auto [v, locus] = field("resolution");
    g.resolution = parse_double(v, locus);
    if (!(g.resolution > 0.0)) throw MapError(locus + ": resolution must be > 0");
  }
  {
    const auto [v, locus] = field("origin");
    std::istringstream in(v);
    std::string x, y, th;
    if (!(in >> x >> y >> th)) throw MapError(locus + ": origin needs 'x y theta'");
    g.origin = Pose2D(parse_double(x, locus), parse_double(y, locus), parse_double(th, locus));
  }
  {
    const auto [v, locus] = field("width");
    g.width = parse_int(v, locus);
  }
  {
    const auto [v, locus] = field("height");
    g.height = parse_int(v, locus);
  }

  std::ifstream pgm(pgm_path, std::ios::binary);
  if (!pgm) throw MapError(pgm_path.string() + ": cannot open");
  const std::string where = pgm_path.string();
  auto token = [&]() {
    std::string t;
    int ch;
    while ((ch = pgm.get()) != EOF) {
      if (ch == '#') {
        while ((ch = pgm.get()) != EOF && ch != '\n') {
        }
        continue;
      }
      if (std::isspace(ch)) {
        if (!t.empty()) break;
        continue;
      }
      t.push_back(static_cast<char>(ch));
    }
    if (t.empty()) throw MapError(where + ": truncated header");
    return t;
  };
  if (token() != "P5") throw MapError(where + ": not a P5 graymap");
  const int w = parse_int(token(), where + " header width");
  const int h = parse_int(token(), where + " header height");
  const int maxval = parse_int(token(), where + " header maxval");
  if (maxval != 255) throw MapError(where + ": maxval must be 255");
  if (w != g.width || h != g.height)
    throw MapError(where + ": image is " + std::to_string(w) + "x" + std::to_string(h) + " but sidecar says " +
                   std::to_string(g.width) + "x" + std::to_string(g.height));

  TriStateMap map(g, CellState::kUnknown);
  std::string row(static_cast<std::size_t>(w), '\0');
  for (int r = 0; r < h; ++r) {
    pgm.read(row.data(), w);
    if (pgm.gcount() != w)
      throw MapError(where + ": truncated pixel data at row " + std::to_string(r) + " of " + std::to_string(h));
    const int y = h - 1 - r;
    for (int x = 0; x < w; ++x) {
      const auto v = static_cast<unsigned char>(row[static_cast<std::size_t>(x)]);
      CellState s;
      if (v == kPgmOccupied) {
        s = CellState::kOccupied;
      } else if (v == kPgmFree) {
        s = CellState::kFree;
      } else if (v == kPgmUnknown) {
        s = CellState::kUnknown;
      } else {
        throw MapError(where + ": pixel (" + std::to_string(x) + ", " + std::to_string(r) + ") has value " +
                       std::to_string(v));
      }
      map.at({x, y}) = s;
    }
  }
  return map;
}

Mapper::Mapper(MapperConfig cfg) : cfg_(cfg) {
  cfg_.validate();
  grid_.geometry.resolution = cfg_.resolution;
}

}  // namespace eddie::mapping

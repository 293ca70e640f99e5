#include "eddie/core/params.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <variant>

namespace eddie {
namespace {

using Field = std::variant<double ParamSet::*, int ParamSet::*, bool ParamSet::*, Polygon ParamSet::*>;

struct Entry {
  const char* key;
  Field field;
};

const std::array kEntries = {
    Entry{"controller_frequency", &ParamSet::controller_frequency},
    Entry{"holonomic_robot", &ParamSet::holonomic_robot},
    Entry{"yaw_goal_tolerance", &ParamSet::yaw_goal_tolerance},
    Entry{"xy_goal_tolerance", &ParamSet::xy_goal_tolerance},
    Entry{"sim_time", &ParamSet::sim_time},
    Entry{"vtheta_samples", &ParamSet::vtheta_samples},
    Entry{"footprint", &ParamSet::footprint},
    Entry{"transform_tolerance", &ParamSet::transform_tolerance},
    Entry{"publish_frequency", &ParamSet::publish_frequency},
    Entry{"inflation_radius", &ParamSet::inflation_radius},
    Entry{"cost_scaling_factor", &ParamSet::cost_scaling_factor},
    Entry{"global_update_frequency", &ParamSet::global_update_frequency},
    Entry{"global_static_map", &ParamSet::global_static_map},
    Entry{"local_update_frequency", &ParamSet::local_update_frequency},
    Entry{"local_publish_frequency", &ParamSet::local_publish_frequency},
    Entry{"local_static_map", &ParamSet::local_static_map},
    Entry{"rolling_window", &ParamSet::rolling_window},
    Entry{"local_width", &ParamSet::local_width},
    Entry{"local_height", &ParamSet::local_height},
    Entry{"resolution", &ParamSet::resolution},
    Entry{"max_vel_x", &ParamSet::max_vel_x},
    Entry{"min_vel_x", &ParamSet::min_vel_x},
    Entry{"max_vel_theta", &ParamSet::max_vel_theta},
    Entry{"min_vel_theta", &ParamSet::min_vel_theta},
    Entry{"min_in_place_vel_theta", &ParamSet::min_in_place_vel_theta},
    Entry{"escape_vel", &ParamSet::escape_vel},
    Entry{"acc_lim_theta", &ParamSet::acc_lim_theta},
    Entry{"acc_lim_x", &ParamSet::acc_lim_x},
    Entry{"acc_lim_y", &ParamSet::acc_lim_y},
    Entry{"wheel_radius", &ParamSet::wheel_radius},
    Entry{"track_width", &ParamSet::track_width},
    Entry{"ticks_per_rev", &ParamSet::ticks_per_rev},
    Entry{"motor_k", &ParamSet::motor_k},
    Entry{"pw_min", &ParamSet::pw_min},
    Entry{"pw_neutral", &ParamSet::pw_neutral},
    Entry{"pw_max", &ParamSet::pw_max},
    Entry{"vx_samples", &ParamSet::vx_samples},
    Entry{"path_distance_bias", &ParamSet::path_distance_bias},
    Entry{"goal_distance_bias", &ParamSet::goal_distance_bias},
    Entry{"occdist_scale", &ParamSet::occdist_scale},
    Entry{"forward_point_distance", &ParamSet::forward_point_distance},
    Entry{"sim_granularity", &ParamSet::sim_granularity},
    Entry{"angular_sim_granularity", &ParamSet::angular_sim_granularity},
    Entry{"carrot_distance", &ParamSet::carrot_distance},
    Entry{"rotate_in_place_threshold", &ParamSet::rotate_in_place_threshold},
    Entry{"escape_duration", &ParamSet::escape_duration},
    Entry{"max_recoveries", &ParamSet::max_recoveries},
    Entry{"planner_frequency", &ParamSet::planner_frequency},
};

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

[[noreturn]] void fail(const std::string& key, int line, const std::string& msg) {
  std::ostringstream os;
  if (line > 0) os << "line " << line << ": ";
  os << "'" << key << "': " << msg;
  throw ParamError(os.str(), key, line);
}

double parse_double(std::string_view text, const std::string& key, int line) {
  const std::string t = trim(text);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) fail(key, line, "expected a number, got '" + t + "'");
  return v;
}

int parse_int(std::string_view text, const std::string& key, int line) {
  const std::string t = trim(text);
  int v = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) fail(key, line, "expected an integer, got '" + t + "'");
  return v;
}

bool parse_bool(std::string_view text, const std::string& key, int line) {
  const std::string t = trim(text);
  if (t == "true") return true;
  if (t == "false") return false;
  fail(key, line, "expected true or false, got '" + t + "'");
}

// [[x, y], [x, y], ...]
Polygon parse_polygon(std::string_view text, const std::string& key, int line) {
  const std::string t = trim(text);
  if (t.size() < 2 || t.front() != '[' || t.back() != ']') fail(key, line, "expected a list of [x, y] pairs");
  Polygon poly;
  std::size_t pos = 1;
  const std::size_t end = t.size() - 1;
  auto skip_ws = [&] {
    while (pos < end && std::isspace(static_cast<unsigned char>(t[pos]))) ++pos;
  };
  skip_ws();
  while (pos < end) {
    if (t[pos] != '[') fail(key, line, "expected '[' at column " + std::to_string(pos + 1));
    const std::size_t close = t.find(']', pos);
    if (close == std::string::npos || close > end) fail(key, line, "unterminated pair");
    const std::string pair = t.substr(pos + 1, close - pos - 1);
    const std::size_t comma = pair.find(',');
    if (comma == std::string::npos) fail(key, line, "pair needs two numbers");
    poly.push_back({parse_double(pair.substr(0, comma), key, line), parse_double(pair.substr(comma + 1), key, line)});
    pos = close + 1;
    skip_ws();
    if (pos < end) {
      if (t[pos] != ',') fail(key, line, "expected ',' between pairs");
      ++pos;
      skip_ws();
    }
  }
  return poly;
}

std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  std::string s(buf.data(), ptr);
  // Keep a decimal marker so the value reads as a float.
  if (s.find_first_of(".eE") == std::string::npos && s.find("inf") == std::string::npos &&
      s.find("nan") == std::string::npos) {
    s += ".0";
  }
  return s;
}

}  // namespace

void validate(const ParamSet& p) {
  auto positive = [](const char* key, double v) {
    if (!(v > 0.0)) fail(key, 0, "must be > 0");
  };
  positive("controller_frequency", p.controller_frequency);
  positive("publish_frequency", p.publish_frequency);
  positive("global_update_frequency", p.global_update_frequency);
  positive("local_update_frequency", p.local_update_frequency);
  positive("local_publish_frequency", p.local_publish_frequency);
  positive("planner_frequency", p.planner_frequency);
  positive("yaw_goal_tolerance", p.yaw_goal_tolerance);
  positive("xy_goal_tolerance", p.xy_goal_tolerance);
  positive("sim_time", p.sim_time);
  positive("resolution", p.resolution);
  positive("local_width", p.local_width);
  positive("local_height", p.local_height);
  positive("acc_lim_x", p.acc_lim_x);
  positive("acc_lim_theta", p.acc_lim_theta);
  positive("wheel_radius", p.wheel_radius);
  positive("track_width", p.track_width);
  positive("motor_k", p.motor_k);
  positive("sim_granularity", p.sim_granularity);
  positive("angular_sim_granularity", p.angular_sim_granularity);
  positive("escape_duration", p.escape_duration);
  if (p.transform_tolerance < 0.0) fail("transform_tolerance", 0, "must be >= 0");
  if (p.acc_lim_y < 0.0) fail("acc_lim_y", 0, "must be >= 0");
  if (p.vtheta_samples < 1) fail("vtheta_samples", 0, "must be >= 1");
  if (p.vx_samples < 1) fail("vx_samples", 0, "must be >= 1");
  if (p.ticks_per_rev < 1) fail("ticks_per_rev", 0, "must be >= 1");
  if (p.max_recoveries < 0) fail("max_recoveries", 0, "must be >= 0");
  if (p.max_vel_x < 0.0) fail("max_vel_x", 0, "must be >= 0");
  if (p.min_vel_x < 0.0) fail("min_vel_x", 0, "must be >= 0");
  if (p.min_vel_x > p.max_vel_x) fail("min_vel_x", 0, "must not exceed max_vel_x");
  if (p.min_vel_theta > p.max_vel_theta) fail("min_vel_theta", 0, "must not exceed max_vel_theta");
  if (p.min_in_place_vel_theta < 0.0) fail("min_in_place_vel_theta", 0, "must be >= 0");
  if (p.escape_vel > 0.0) fail("escape_vel", 0, "must be <= 0 (reverse)");
  if (!(p.pw_min < p.pw_neutral && p.pw_neutral < p.pw_max)) fail("pw_neutral", 0, "need pw_min < pw_neutral < pw_max");
  if (p.footprint.size() < 3) fail("footprint", 0, "needs at least 3 vertices");
  if (!polygon_is_simple(p.footprint)) fail("footprint", 0, "polygon is not simple");
  if (!polygon_contains(p.footprint, {0.0, 0.0})) fail("footprint", 0, "polygon must contain the robot origin");
  if (p.inflation_radius < p.inscribed_radius()) fail("inflation_radius", 0, "must be >= the footprint inscribed radius");
  if (p.cost_scaling_factor < 0.0) fail("cost_scaling_factor", 0, "must be >= 0");
}

ParamSet parse_params(const std::string& text) {
  ParamSet params;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::size_t hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const std::size_t colon = line.find(':');
    if (colon == std::string::npos) fail(line, line_no, "expected 'key: value'");
    const std::string key = trim(line.substr(0, colon));
    const std::string value = line.substr(colon + 1);
    if (key.empty()) fail(key, line_no, "empty key");
    auto it = std::find_if(kEntries.begin(), kEntries.end(), [&](const Entry& e) { return key == e.key; });
    if (it == kEntries.end()) fail(key, line_no, "unknown parameter");
    if (!seen.insert(key).second) fail(key, line_no, "duplicate parameter");
    std::visit(
        [&](auto member) {
          using T = std::remove_reference_t<decltype(params.*member)>;
          if constexpr (std::is_same_v<T, double>) {
            params.*member = parse_double(value, key, line_no);
          } else if constexpr (std::is_same_v<T, int>) {
            params.*member = parse_int(value, key, line_no);
          } else if constexpr (std::is_same_v<T, bool>) {
            params.*member = parse_bool(value, key, line_no);
          } else {
            params.*member = parse_polygon(value, key, line_no);
          }
        },
        it->field);
  }
  // Cross-key invariants are reported against the key, not a line.
  validate(params);
  return params;
}

ParamSet load_params(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParamError("cannot open parameter file " + path.string(), "", 0);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_params(buf.str());
}

std::string format_params(const ParamSet& params) {
  std::ostringstream os;
  for (const auto& e : kEntries) {
    os << e.key << ": ";
    std::visit(
        [&](auto member) {
          const auto& v = params.*member;
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, double>) {
            os << format_double(v);
          } else if constexpr (std::is_same_v<T, int>) {
            os << v;
          } else if constexpr (std::is_same_v<T, bool>) {
            os << (v ? "true" : "false");
          } else {
            os << '[';
            for (std::size_t i = 0; i < v.size(); ++i) {
              if (i) os << ", ";
              os << '[' << format_double(v[i].x) << ", " << format_double(v[i].y) << ']';
            }
            os << ']';
          }
        },
        e.field);
    os << '\n';
  }
  return os.str();
}

void save_params(const ParamSet& params, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ParamError("cannot write parameter file " + path.string(), "", 0);
  out << format_params(params);
}

}  // namespace eddie

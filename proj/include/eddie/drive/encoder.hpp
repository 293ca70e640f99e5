#pragma once

#include <cstdint>

namespace eddie::drive {

enum class Wheel : std::uint8_t { kLeft, kRight };

// One wheel's tick report. `pulse_width` is the time the tick took.
struct EncoderEvent {
  Wheel wheel = Wheel::kLeft;
  int ticks = 0;
  double pulse_width = 0.0;  // s
  double stamp = 0.0;        // s
};

enum class Edge : std::uint8_t { kARise, kAFall, kBRise, kBFall };
enum class Direction : std::int8_t { kBackward = -1, kInvalid = 0, kForward = 1 };

// Two-channel encoder state. Channel A leading B counts forward. One full
// Gray cycle (four edges) is one encoder tick.
struct QuadratureState {
  bool level_a = false;
  bool level_b = false;
  std::int64_t edges = 0;

  bool operator==(const QuadratureState&) const = default;
};

inline constexpr int kEdgesPerTick = 4;
inline constexpr int kDefaultTicksPerRev = 36;

struct DecodeResult {
  QuadratureState state;
  Direction direction = Direction::kInvalid;
};

// Applies one edge. An edge that does not match the current channel level
// is reported as kInvalid and leaves the state untouched.
DecodeResult decode_quadrature(const QuadratureState& state, Edge edge);

// The edge that moves `state` one Gray step in `direction` (kInvalid is
// treated as forward).
Edge next_edge(const QuadratureState& state, Direction direction);

// Completed ticks represented by an edge count (floor division).
std::int64_t ticks_from_edges(std::int64_t edges);

// Arc length per tick: 2*pi*r / ticks_per_rev. Throws for r <= 0.
double tick_distance(double wheel_radius, int ticks_per_rev = kDefaultTicksPerRev);

// s = d / t, signed by direction. Throws for t <= 0.
double wheel_speed_from_pulse(double distance, double pulse_width, Direction direction = Direction::kForward);

}  // namespace eddie::drive

#include "eddie/drive/encoder.hpp"

#include <numbers>
#include <stdexcept>

namespace eddie::drive {
namespace {
// Position within the forward Gray sequence 00 -> 10 -> 11 -> 01.
int phase(bool a, bool b) {
  if (!a && !b) return 0;
  if (a && !b) return 1;
  if (a && b) return 2;
  return 3;
}
}  // namespace

DecodeResult decode_quadrature(const QuadratureState& state, Edge edge) {
  QuadratureState next = state;
  switch (edge) {
    case Edge::kARise:
      if (state.level_a) return {state, Direction::kInvalid};
      next.level_a = true;
      break;
    case Edge::kAFall:
      if (!state.level_a) return {state, Direction::kInvalid};
      next.level_a = false;
      break;
    case Edge::kBRise:
      if (state.level_b) return {state, Direction::kInvalid};
      next.level_b = true;
      break;
    case Edge::kBFall:
      if (!state.level_b) return {state, Direction::kInvalid};
      next.level_b = false;
      break;
  }
  const int step = (phase(next.level_a, next.level_b) - phase(state.level_a, state.level_b) + 4) % 4;
  // A single-channel edge always moves the phase by +-1.
  const Direction dir = step == 1 ? Direction::kForward : Direction::kBackward;
  next.edges += static_cast<int>(dir);
  return {next, dir};
}

Edge next_edge(const QuadratureState& state, Direction direction) {
  const bool backward = direction == Direction::kBackward;
  switch (phase(state.level_a, state.level_b)) {
    case 0:
      return backward ? Edge::kBRise : Edge::kARise;
    case 1:
      return backward ? Edge::kAFall : Edge::kBRise;
    case 2:
      return backward ? Edge::kBFall : Edge::kAFall;
    default:
      return backward ? Edge::kARise : Edge::kBFall;
  }
}

std::int64_t ticks_from_edges(std::int64_t edges) {
  std::int64_t q = edges / kEdgesPerTick;
  if (edges % kEdgesPerTick != 0 && edges < 0) --q;
  return q;
}

double tick_distance(double wheel_radius, int ticks_per_rev) {
  if (!(wheel_radius > 0.0)) throw std::invalid_argument("wheel radius must be > 0");
  if (ticks_per_rev < 1) throw std::invalid_argument("ticks per revolution must be >= 1");
  return 2.0 * std::numbers::pi * wheel_radius / ticks_per_rev;
}

double wheel_speed_from_pulse(double distance, double pulse_width, Direction direction) {
  if (!(pulse_width > 0.0)) throw std::invalid_argument("pulse width must be > 0");
  const double sign = direction == Direction::kBackward ? -1.0 : 1.0;
  return sign * distance / pulse_width;
}

}  // namespace eddie::drive

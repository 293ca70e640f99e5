#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "eddie/drive/encoder.hpp"
#include "eddie/drive/motor.hpp"
#include "gtest/gtest.h"

namespace eddie::drive {
namespace {

constexpr double kPi = std::numbers::pi;

TEST(MotorTest, CalibrateK) {
  EXPECT_DOUBLE_EQ(calibrate_k(120.0, 2.0), 60.0);
  EXPECT_DOUBLE_EQ(calibrate_k(0.0, 1.0), 0.0);
  EXPECT_THROW(calibrate_k(100.0, 0.0), std::invalid_argument);
  EXPECT_THROW(calibrate_k(100.0, -1.0), std::invalid_argument);
}

TEST(MotorTest, PulseToVelocity) {
  MotorCalibration c;
  EXPECT_EQ(pulse_width_to_velocity(0.0, c).velocity, 0.0);
  // 2*pi*0.0762/60 * 100 * 1.0
  EXPECT_NEAR(pulse_width_to_velocity(0.5, c).velocity * 2.0, 2 * kPi * 0.0762 / 60 * 100 * 1.0, 1e-12);

  MotorCalibration wide{100.0, 0.0762, 0.0, 1.0, 2.0};
  const auto v = pulse_width_to_velocity(1.0, wide);
  EXPECT_NEAR(v.velocity, 0.798, 5e-4);
  EXPECT_FALSE(v.clamped);

  MotorCalibration one_rev{60.0, 0.0762, 0.0, 1.0, 2.0};
  EXPECT_NEAR(pulse_width_to_velocity(1.0, one_rev).velocity, 2 * kPi * 0.0762, 1e-12);
}

TEST(MotorTest, PulseOutOfRangeIsClampedAndFlagged) {
  MotorCalibration c;
  const auto hi = pulse_width_to_velocity(0.9, c);
  EXPECT_TRUE(hi.clamped);
  EXPECT_DOUBLE_EQ(hi.velocity, pulse_width_to_velocity(0.5, c).velocity);
  const auto lo = pulse_width_to_velocity(-0.9, c);
  EXPECT_TRUE(lo.clamped);
  EXPECT_DOUBLE_EQ(lo.velocity, pulse_width_to_velocity(-0.5, c).velocity);
  EXPECT_LT(lo.velocity, 0.0);
}

TEST(MotorTest, VelocityToPulse) {
  MotorCalibration wide{100.0, 0.0762, 0.0, 1.0, 2.0};
  EXPECT_EQ(velocity_to_pulse_width(0.0, wide).offset_ms, 0.0);
  EXPECT_EQ(velocity_to_pulse_width(0.0, wide).absolute_ms(wide), 1.0);
  const double v = pulse_width_to_velocity(1.0, wide).velocity;
  EXPECT_NEAR(velocity_to_pulse_width(v, wide).offset_ms, 1.0, 1e-12);

  MotorCalibration narrow{100.0, 0.0762, 1.4, 1.5, 1.6};
  const auto p = velocity_to_pulse_width(10.0, narrow);
  EXPECT_TRUE(p.clamped);
  EXPECT_NEAR(p.offset_ms, 0.1, 1e-12);
  EXPECT_NEAR(velocity_to_pulse_width(-10.0, narrow).offset_ms, -0.1, 1e-12);
}

TEST(MotorTest, RoundTripAndLinearityProperty) {
  MotorCalibration c;
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> pw(-0.25, 0.25);
  for (int i = 0; i < 5000; ++i) {
    const double x = pw(rng);
    const double v = pulse_width_to_velocity(x, c).velocity;
    const auto back = velocity_to_pulse_width(v, c);
    EXPECT_FALSE(back.clamped);
    EXPECT_NEAR(pulse_width_to_velocity(back.offset_ms, c).velocity, v, 1e-9);
    EXPECT_NEAR(pulse_width_to_velocity(2 * x, c).velocity, 2 * v, 1e-12);
  }
}

TEST(MotorTest, CalibrationValidation) {
  EXPECT_NO_THROW(MotorCalibration{}.validate());
  EXPECT_THROW((MotorCalibration{100.0, 0.0762, 1.6, 1.5, 2.0}.validate()), std::invalid_argument);
  EXPECT_THROW((MotorCalibration{100.0, 0.0, 1.0, 1.5, 2.0}.validate()), std::invalid_argument);
}

TEST(DiffDriveTest, TwistToWheelSpeeds) {
  EXPECT_EQ(twist_to_wheel_speeds({0.175, 0.0}, 0.39), (WheelSpeeds{0.175, 0.175}));
  const auto spin = twist_to_wheel_speeds({0.0, 1.0}, 0.4);
  EXPECT_DOUBLE_EQ(spin.left, -0.2);
  EXPECT_DOUBLE_EQ(spin.right, 0.2);
}

TEST(DiffDriveTest, InverseProperty) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int i = 0; i < 5000; ++i) {
    const WheelSpeeds w{u(rng), u(rng)};
    const auto back = twist_to_wheel_speeds(wheel_speeds_to_twist(w, 0.39), 0.39);
    EXPECT_NEAR(back.left, w.left, 1e-12);
    EXPECT_NEAR(back.right, w.right, 1e-12);
    const Twist t{u(rng), u(rng)};
    const auto t2 = wheel_speeds_to_twist(twist_to_wheel_speeds(t, 0.39), 0.39);
    EXPECT_NEAR(t2.linear, t.linear, 1e-12);
    EXPECT_NEAR(t2.angular, t.angular, 1e-12);
  }
}

// Reference table: for each (a, b) level pair, the forward successor edge.
struct Step {
  bool a, b;
  Edge forward, backward;
};
const Step kTable[] = {
    {false, false, Edge::kARise, Edge::kBRise},
    {true, false, Edge::kBRise, Edge::kAFall},
    {true, true, Edge::kAFall, Edge::kBFall},
    {false, true, Edge::kBFall, Edge::kARise},
};

const Step& row(const QuadratureState& s) {
  for (const auto& r : kTable)
    if (r.a == s.level_a && r.b == s.level_b) return r;
  throw std::logic_error("unreachable");
}

TEST(QuadratureTest, ForwardSequenceIsOneTickOfFourSteps) {
  QuadratureState s;
  for (Edge e : {Edge::kARise, Edge::kBRise, Edge::kAFall, Edge::kBFall}) {
    const auto r = decode_quadrature(s, e);
    EXPECT_EQ(r.direction, Direction::kForward);
    s = r.state;
  }
  EXPECT_EQ(s.edges, 4);
  EXPECT_EQ(ticks_from_edges(s.edges), 1);
  EXPECT_FALSE(s.level_a);
  EXPECT_FALSE(s.level_b);
}

TEST(QuadratureTest, MirroredSequenceCountsBackward) {
  QuadratureState s;
  for (Edge e : {Edge::kBRise, Edge::kARise, Edge::kBFall, Edge::kAFall}) {
    const auto r = decode_quadrature(s, e);
    EXPECT_EQ(r.direction, Direction::kBackward);
    s = r.state;
  }
  EXPECT_EQ(s.edges, -4);
  EXPECT_EQ(ticks_from_edges(s.edges), -1);
}

TEST(QuadratureTest, RepeatedEdgeIsInvalid) {
  QuadratureState s = decode_quadrature({}, Edge::kARise).state;
  const auto r = decode_quadrature(s, Edge::kARise);
  EXPECT_EQ(r.direction, Direction::kInvalid);
  EXPECT_EQ(r.state, s);
}

TEST(QuadratureTest, RandomWalkMatchesTableAndReverses) {
  std::mt19937_64 rng(9);
  std::bernoulli_distribution fwd(0.6);
  QuadratureState s;
  std::vector<bool> moves;
  std::int64_t expected = 0;
  for (int i = 0; i < 20000; ++i) {
    const bool f = fwd(rng);
    const Step& r = row(s);
    const auto out = decode_quadrature(s, f ? r.forward : r.backward);
    ASSERT_EQ(out.direction, f ? Direction::kForward : Direction::kBackward);
    expected += f ? 1 : -1;
    s = out.state;
    moves.push_back(f);
  }
  EXPECT_EQ(s.edges, expected);
  // Undo the walk: each move is reversed by the opposite-direction edge.
  for (auto it = moves.rbegin(); it != moves.rend(); ++it) {
    const Step& r = row(s);
    s = decode_quadrature(s, *it ? r.backward : r.forward).state;
  }
  EXPECT_EQ(s.edges, 0);
  EXPECT_EQ(s, QuadratureState{});
}

TEST(QuadratureTest, TicksFloorTowardNegative) {
  EXPECT_EQ(ticks_from_edges(7), 1);
  EXPECT_EQ(ticks_from_edges(-1), -1);
  EXPECT_EQ(ticks_from_edges(-4), -1);
  EXPECT_EQ(ticks_from_edges(-5), -2);
}

TEST(EncoderTest, TickDistance) {
  EXPECT_NEAR(tick_distance(0.18 / kPi), 0.01, 1e-15);
  EXPECT_NEAR(tick_distance(0.0762), 0.013299, 5e-7);
  EXPECT_THROW(tick_distance(0.0), std::invalid_argument);
}

TEST(EncoderTest, WheelSpeedFromPulse) {
  EXPECT_NEAR(wheel_speed_from_pulse(0.013299, 0.05), 0.266, 5e-4);
  EXPECT_EQ(wheel_speed_from_pulse(0.0, 0.3), 0.0);
  EXPECT_LT(wheel_speed_from_pulse(0.01, 0.1, Direction::kBackward), 0.0);
  EXPECT_THROW(wheel_speed_from_pulse(0.01, 0.0), std::invalid_argument);
}

}  // namespace
}  // namespace eddie::drive

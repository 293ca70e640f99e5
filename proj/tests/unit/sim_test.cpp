#include <cmath>
#include <random>

#include "eddie/odometry/odometry.hpp"
#include "eddie/sim/sensors.hpp"
#include "eddie/sim/simulator.hpp"
#include "eddie/sim/world.hpp"
#include "gtest/gtest.h"

namespace eddie::sim {
namespace {

const std::string kDir = EDDIE_SCENARIO_DIR;

Simulator make_sim(const std::string& name, std::uint64_t seed = 1) {
  auto cfg = SimConfig::from_params(ParamSet{});
  cfg.seed = seed;
  return Simulator(load_scenario(kDir + "/" + name + ".json"), cfg);
}

World open_world() {
  World w;
  w.bounds = {-10, -10, 10, 10};
  return w;
}

// Independent oracle: intersection of a ray with segment [a, b] by Cramer's rule.
double ray_segment(Point2 o, double angle, Point2 a, Point2 b) {
  const double dx = std::cos(angle), dy = std::sin(angle);
  const double ex = b.x - a.x, ey = b.y - a.y;
  const double den = dx * (-ey) - dy * (-ex);
  if (std::abs(den) < 1e-15) return INFINITY;
  const double rx = a.x - o.x, ry = a.y - o.y;
  const double t = (rx * (-ey) - ry * (-ex)) / den;
  const double u = (dx * ry - dy * rx) / den;
  return (t >= 0 && u >= 0 && u <= 1) ? t : INFINITY;
}

TEST(ScenarioTest, EmptyRoomHasOnlyBoundaryWalls) {
  const auto s = load_scenario(kDir + "/empty_room.json");
  EXPECT_EQ(s.world.rects.size(), 4u);
  EXPECT_TRUE(s.world.circles.empty());
  EXPECT_TRUE(s.world.persons.empty());
}

TEST(ScenarioTest, BoxesAndPersonRoom) {
  const auto boxes = load_scenario(kDir + "/boxes.json");
  ASSERT_EQ(boxes.world.rects.size(), 5u);
  const Rect& box = boxes.world.rects.back();
  EXPECT_NEAR((box.min_x + box.max_x) / 2, 3.0, 1e-12);
  EXPECT_NEAR((box.min_y + box.max_y) / 2, 2.5, 1e-12);

  const auto room = load_scenario(kDir + "/person_room.json");
  ASSERT_EQ(room.world.persons.size(), 1u);
  EXPECT_NEAR(distance(room.world.persons[0].pose, room.robot_start), 2.0, 1e-12);
}

TEST(ScenarioTest, PersonInsideWallIsRejectedWithLocus) {
  const std::string text = R"({"bounds": {"min_x": 0, "min_y": 0, "max_x": 4, "max_y": 4},
    "obstacles": [{"type": "rect", "min_x": 1, "min_y": 1, "max_x": 2, "max_y": 2}],
    "persons": [{"id": "bob", "x": 1.5, "y": 1.5, "theta": 0}],
    "robot_start": {"x": 3, "y": 3, "theta": 0}})";
  try {
    parse_scenario(text);
    FAIL() << "expected ScenarioError";
  } catch (const ScenarioError& e) {
    EXPECT_EQ(e.locus(), "persons[0] 'bob'");
  }
}

TEST(ScenarioTest, MalformedInputs) {
  EXPECT_THROW(parse_scenario("{"), ScenarioError);
  EXPECT_THROW(parse_scenario(R"({"bounds": {"min_x": 0, "min_y": 0, "max_x": 4, "max_y": 4}})"), ScenarioError);
  EXPECT_THROW(parse_scenario(R"({"bounds": {"min_x": 0, "min_y": 0, "max_x": 4, "max_y": 4},
    "obstacles": [{"type": "blob"}], "robot_start": {"x": 2, "y": 2}})"),
               ScenarioError);
  EXPECT_THROW(load_scenario(kDir + "/does_not_exist.json"), ScenarioError);
}

TEST(RasterizeTest, TouchingEdgesDoNotOccupy) {
  World w;
  w.bounds = {0, 0, 1, 1};
  w.rects.push_back({0.2, 0.2, 0.4, 0.4});
  w.circles.push_back({0.75, 0.75, 0.04});
  const TriStateMap m = rasterize(w, 0.1);
  ASSERT_EQ(m.width(), 10);
  ASSERT_EQ(m.height(), 10);
  int occupied = 0;
  for (int y = 0; y < 10; ++y)
    for (int x = 0; x < 10; ++x) {
      const bool in_rect = x >= 2 && x <= 3 && y >= 2 && y <= 3;
      const bool in_circle = x == 7 && y == 7;
      EXPECT_EQ(m.at({x, y}) == CellState::kOccupied, in_rect || in_circle) << x << "," << y;
      occupied += m.at({x, y}) == CellState::kOccupied;
    }
  EXPECT_EQ(occupied, 5);
}

TEST(RasterizeTest, EverySolidSampleLandsInAnOccupiedCell) {
  const Scenario s = load_scenario(kDir + "/person_room.json");
  const double res = 0.05;
  const TriStateMap m = rasterize(s.world, res);
  std::size_t occupied = 0, sampled = 0;
  for (int y = 0; y < m.height(); ++y)
    for (int x = 0; x < m.width(); ++x) {
      bool any = false;
      for (int j = 1; j < 10 && !any; ++j)
        for (int i = 1; i < 10 && !any; ++i)
          any = point_in_solid(s.world, {m.geometry.origin.x + (x + i / 10.0) * res,
                                         m.geometry.origin.y + (y + j / 10.0) * res});
      if (any) {
        EXPECT_EQ(m.at({x, y}), CellState::kOccupied) << x << "," << y;
      }
      occupied += m.at({x, y}) == CellState::kOccupied;
      sampled += any;
    }
  // Cells the samples miss are only thin slivers along curved edges.
  EXPECT_LE(occupied - sampled, sampled / 20);
  EXPECT_EQ(m.at(m.geometry.world_to_cell(4.5, 2.5)), CellState::kOccupied);
}

TEST(SimStepTest, StraightSecondEmitsQuantizedTicks) {
  auto sim = make_sim("empty_room");
  const Pose2D start = sim.ground_truth();
  sim.set_wheel_speeds({0.175, 0.175});
  const auto r = sim.step(1.0);
  EXPECT_FALSE(r.collision);
  EXPECT_NEAR(sim.ground_truth().x - start.x, 0.175, 1e-12);
  EXPECT_NEAR(sim.ground_truth().y, start.y, 1e-12);
  const int expected = static_cast<int>(std::floor(0.175 / drive::tick_distance(0.0762)));
  EXPECT_EQ(expected, 13);
  int left = 0, right = 0;
  for (const auto& e : r.encoder) (e.wheel == drive::Wheel::kLeft ? left : right) += e.ticks;
  EXPECT_EQ(left, expected);
  EXPECT_EQ(right, expected);
  for (const auto& e : r.encoder) {
    EXPECT_GT(e.pulse_width, 0.0);
    EXPECT_NEAR(e.pulse_width, drive::tick_distance(0.0762) / 0.175, 1e-9);
  }
}

TEST(SimStepTest, ZeroCommandDoesNothing) {
  auto sim = make_sim("empty_room");
  const Pose2D start = sim.ground_truth();
  for (int i = 0; i < 30; ++i) {
    const auto r = sim.step(1.0 / 15);
    EXPECT_TRUE(r.encoder.empty());
    EXPECT_FALSE(r.collision);
  }
  EXPECT_EQ(sim.ground_truth(), start);
}

TEST(SimStepTest, DrivingIntoWallStopsAtContact) {
  auto sim = make_sim("empty_room");
  sim.set_wheel_speeds({0.175, 0.175});
  bool collided = false;
  for (int i = 0; i < 600 && !collided; ++i) collided = sim.step(1.0 / 15).collision;
  ASSERT_TRUE(collided);
  const double front = sim.ground_truth().x + 0.1;
  EXPECT_LE(front, 5.9);
  EXPECT_NEAR(front, 5.9, 1e-9);
  EXPECT_FALSE(polygon_hits_world(sim.world(), transform_polygon(sim.config().footprint, sim.ground_truth())));
  // Further forward commands keep it pinned.
  const Pose2D pinned = sim.ground_truth();
  EXPECT_TRUE(sim.step(1.0 / 15).collision);
  EXPECT_NEAR(sim.ground_truth().x, pinned.x, 1e-9);
}

TEST(SimStepTest, ScansAtConfiguredRate) {
  auto sim = make_sim("empty_room");
  int scans = 0;
  for (int i = 0; i < 150; ++i) scans += sim.step(1.0 / 15).scan.has_value();
  EXPECT_EQ(scans, 100);  // 10 s at 10 Hz
}

TEST(SimStepTest, DeterministicEventStream) {
  auto run = [] {
    auto cfg = SimConfig::from_params(ParamSet{});
    cfg.scan.noise_sigma = 0.01;
    Simulator sim(load_scenario(kDir + "/boxes.json"), cfg);
    std::mt19937_64 cmd(99);
    std::uniform_real_distribution<double> u(-0.2, 0.2);
    std::vector<double> trace;
    for (int i = 0; i < 300; ++i) {
      if (i % 15 == 0) sim.set_wheel_speeds({u(cmd), u(cmd)});
      const auto r = sim.step(1.0 / 15);
      for (const auto& e : r.encoder) trace.insert(trace.end(), {double(e.ticks), e.pulse_width, e.stamp});
      if (r.scan) trace.insert(trace.end(), r.scan->ranges.begin(), r.scan->ranges.end());
      trace.insert(trace.end(), {sim.ground_truth().x, sim.ground_truth().y, sim.ground_truth().theta});
    }
    return trace;
  };
  const auto a = run();
  const auto b = run();
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::isinf(a[i])) {
      ASSERT_TRUE(std::isinf(b[i]));
    } else {
      ASSERT_EQ(a[i], b[i]) << i;
    }
  }
}

TEST(SimStepTest, EncoderTicksMatchWheelRotation) {
  auto sim = make_sim("empty_room");
  std::mt19937_64 cmd(5);
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  std::int64_t left = 0, right = 0;
  for (int i = 0; i < 600; ++i) {
    if (i % 10 == 0) sim.set_wheel_speeds({u(cmd) * 0.1, u(cmd) * 0.1});
    for (const auto& e : sim.step(1.0 / 15).encoder) (e.wheel == drive::Wheel::kLeft ? left : right) += e.ticks;
  }
  const double q = sim.tick_quantum();
  EXPECT_NEAR(static_cast<double>(left), std::floor(sim.wheel_angle(drive::Wheel::kLeft) / q), 1.0);
  EXPECT_NEAR(static_cast<double>(right), std::floor(sim.wheel_angle(drive::Wheel::kRight) / q), 1.0);
}

TEST(SimStepTest, OdometryFromTicksTracksGroundTruth) {
  auto sim = make_sim("empty_room");
  odometry::OdometrySource odom(odometry::DriveGeometry{}, sim.ground_truth());
  sim.set_wheel_speeds({0.15, 0.17});
  int events = 0;
  for (int i = 0; i < 300; ++i) {
    const auto r = sim.step(1.0 / 15);
    for (const auto& e : r.encoder) odom.add(e);
    events += static_cast<int>(r.encoder.size());
    odom.sync(sim.time());
  }
  const double err = distance(odom.state().pose, sim.ground_truth());
  EXPECT_LE(err, drive::tick_distance(0.0762) * events);
  EXPECT_LT(err, 0.05);
}

TEST(RaycastTest, PerpendicularWall) {
  World w = open_world();
  w.rects.push_back({1.0, -5.0, 1.2, 5.0});
  ScanConfig cfg;
  cfg.beams = 641;  // odd so one beam is dead ahead
  const auto scan = raycast_scan(w, Pose2D(0, 0, 0), cfg);
  EXPECT_NEAR(scan.ranges[320], 1.0, 1e-12);
  EXPECT_NEAR(scan.beam_angle(320), 0.0, 1e-12);
}

TEST(RaycastTest, ObliqueBeamMatchesSegmentOracle) {
  World w = open_world();
  w.rects.push_back({1.0, -5.0, 1.2, 5.0});
  const double hit = ray_distance(w, {0, 0}, kPi / 4, 4.0);
  EXPECT_NEAR(hit, std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(hit, ray_segment({0, 0}, kPi / 4, {1.0, -5.0}, {1.0, 5.0}), 1e-12);
}

TEST(RaycastTest, EmptyDirectionIsSentinelAndNearIsClamped) {
  World w = open_world();
  w.circles.push_back({0.3, 0.0, 0.05});
  ScanConfig cfg;
  cfg.beams = 3;
  const auto scan = raycast_scan(w, Pose2D(0, 0, 0), cfg);
  EXPECT_EQ(scan.ranges[0], LaserScan::kNoReading);
  EXPECT_EQ(scan.ranges[1], cfg.range_min);
  EXPECT_EQ(scan.ranges[2], LaserScan::kNoReading);
}

TEST(RaycastTest, ParallelMatchesSerialBitForBit) {
  const auto s = load_scenario(kDir + "/boxes.json");
  ScanConfig cfg;
  cfg.noise_sigma = 0.02;
  std::mt19937_64 a(3), b(3);
  for (double th = -kPi; th < kPi; th += 0.37) {
    const auto p = raycast_scan(s.world, Pose2D(1.5, 1.2, th), cfg, &a);
    const auto q = raycast_scan_serial(s.world, Pose2D(1.5, 1.2, th), cfg, &b);
    ASSERT_EQ(p.ranges.size(), q.ranges.size());
    for (std::size_t i = 0; i < p.ranges.size(); ++i) {
      if (std::isinf(p.ranges[i])) {
        ASSERT_TRUE(std::isinf(q.ranges[i]));
      } else {
        ASSERT_EQ(p.ranges[i], q.ranges[i]);
      }
    }
  }
}

TEST(RaycastTest, EndpointsLieOnObstacleBoundaries) {
  const auto s = load_scenario(kDir + "/boxes.json");
  std::vector<std::pair<Point2, Point2>> edges;
  for (const auto& r : s.world.rects) {
    const Point2 c[4] = {{r.min_x, r.min_y}, {r.max_x, r.min_y}, {r.max_x, r.max_y}, {r.min_x, r.max_y}};
    for (int k = 0; k < 4; ++k) edges.push_back({c[k], c[(k + 1) % 4]});
  }
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> ux(0.3, 5.7), uy(0.3, 4.7), ut(-kPi, kPi);
  ScanConfig cfg;
  cfg.range_min = 0.0;
  int checked = 0;
  for (int n = 0; n < 20; ++n) {
    const Pose2D p(ux(rng), uy(rng), ut(rng));
    if (point_in_solid(s.world, {p.x, p.y})) continue;
    const auto scan = raycast_scan(s.world, p, cfg);
    for (std::size_t i = 0; i < scan.ranges.size(); ++i) {
      if (!LaserScan::is_reading(scan.ranges[i])) continue;
      const double a = p.theta + scan.beam_angle(i);
      const Point2 end{p.x + scan.ranges[i] * std::cos(a), p.y + scan.ranges[i] * std::sin(a)};
      double best = INFINITY;
      for (const auto& [e0, e1] : edges) best = std::min(best, point_segment_distance(end, e0, e1));
      ASSERT_LT(best, 1e-9);
      ++checked;
    }
  }
  EXPECT_GT(checked, 1000);
}

TEST(FaceTest, FrontalPersonAheadIsDetected) {
  World w = open_world();
  w.persons.push_back({"p", Pose2D(2.0, 0.0, kPi)});
  const auto d = detect_faces(w, Pose2D(0, 0, 0), FaceConfig{});
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].person_id, "p");
  EXPECT_NEAR(d[0].x, 2.0, 1e-12);
  EXPECT_NEAR(d[0].y, 0.0, 1e-12);
}

TEST(FaceTest, RangeFacingFovAndOcclusion) {
  World far = open_world();
  far.persons.push_back({"p", Pose2D(3.5, 0.0, kPi)});
  EXPECT_TRUE(detect_faces(far, Pose2D(0, 0, 0), FaceConfig{}).empty());

  World away = open_world();
  away.persons.push_back({"p", Pose2D(2.0, 0.0, 0.0)});
  EXPECT_TRUE(detect_faces(away, Pose2D(0, 0, 0), FaceConfig{}).empty());

  World side = open_world();
  side.persons.push_back({"p", Pose2D(0.0, 2.0, -kPi / 2)});
  EXPECT_TRUE(detect_faces(side, Pose2D(0, 0, 0), FaceConfig{}).empty());

  World blocked = open_world();
  blocked.persons.push_back({"p", Pose2D(2.0, 0.0, kPi)});
  blocked.rects.push_back({0.9, -0.3, 1.1, 0.3});
  EXPECT_TRUE(detect_faces(blocked, Pose2D(0, 0, 0), FaceConfig{}).empty());

  World edge = open_world();
  edge.persons.push_back({"p", Pose2D(3.0, 0.0, kPi)});
  EXPECT_EQ(detect_faces(edge, Pose2D(0, 0, 0), FaceConfig{}).size(), 1u);
}

TEST(FaceTest, CameraFrameFollowsRobotHeading) {
  World w = open_world();
  w.persons.push_back({"p", Pose2D(1.0, 1.0, -3 * kPi / 4)});
  const auto d = detect_faces(w, Pose2D(0, 0, kPi / 4), FaceConfig{});
  ASSERT_EQ(d.size(), 1u);
  EXPECT_NEAR(d[0].x, std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(d[0].y, 0.0, 1e-12);
}

TEST(FaceTest, FalsePositivesOnlyWhenEnabled) {
  World w = open_world();
  std::mt19937_64 rng(1);
  FaceConfig cfg;
  for (int i = 0; i < 100; ++i) EXPECT_TRUE(detect_faces(w, Pose2D(), cfg, &rng).empty());
  cfg.false_positive_rate = 1.0;
  const auto d = detect_faces(w, Pose2D(), cfg, &rng);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_TRUE(d[0].false_positive);
}

}  // namespace
}  // namespace eddie::sim

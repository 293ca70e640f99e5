#include <gtest/gtest.h>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <mutex>
#include <thread>

#include "eddie/gateway/gateway.hpp"
#include "eddie/gateway/protocol.hpp"
#include "eddie/gateway/server.hpp"

using namespace eddie;
using namespace eddie::gateway;

namespace {

system::RobotSystem make_system() {
  system::SystemConfig c;
  c.photo_dir = std::filesystem::temp_directory_path() / "eddie_gateway_test";
  return system::RobotSystem(sim::load_scenario(std::filesystem::path(EDDIE_SCENARIO_DIR) / "empty_room.json"), c);
}

Json parse(const std::string& s) { return Json::parse(s); }

std::vector<Json> with_topic(const std::vector<std::string>& msgs, const std::string& topic) {
  std::vector<Json> out;
  for (const auto& m : msgs) {
    Json j = parse(m);
    if (j["topic"] == topic) out.push_back(j["data"]);
  }
  return out;
}

std::string msg(const std::string& topic, const Json& data = Json::object()) { return envelope(topic, data); }

}  // namespace

TEST(Protocol, EnvelopeAndPose) {
  const Json j = parse(envelope("pose", encode_pose(Pose2D(1.5, -2.0, 0.25), 3.0)));
  EXPECT_EQ(j.size(), 2u);
  EXPECT_EQ(j["topic"], "pose");
  EXPECT_EQ(j["data"]["x"], 1.5);
  EXPECT_EQ(j["data"]["stamp"], 3.0);
  EXPECT_EQ(decode_pose(j["data"]), Pose2D(1.5, -2.0, 0.25));
}

TEST(Protocol, SmallMapGoesWholeAndRoundTrips) {
  TriStateMap m(GridGeometry{0.05, 2, 2, Pose2D(-1.0, 0.5, 0)}, CellState::kFree);
  m.at({1, 0}) = CellState::kOccupied;
  m.at({0, 1}) = CellState::kUnknown;
  const Json d = encode_map(m, 1.0);
  EXPECT_EQ(d["encoding"], "full");
  EXPECT_EQ(d["data"], Json({0, 100, -1, 0}));
  EXPECT_EQ(d["origin"]["x"], -1.0);
  TriStateMap back;
  apply_map(back, d);
  EXPECT_EQ(back.geometry, m.geometry);
  EXPECT_EQ(back.data, m.data);
}

TEST(Protocol, TiledUpdateCarriesOnlyChangedTiles) {
  const GridGeometry g{0.05, 300, 130, Pose2D()};
  TriStateMap prev(g, CellState::kUnknown);
  TriStateMap cur = prev;
  cur.at({299, 129}) = CellState::kOccupied;  // last, clipped tile: 44 x 2
  cur.at({70, 10}) = CellState::kFree;
  const Json d = encode_map_tiles(prev, cur, 2.0);
  ASSERT_EQ(d["encoding"], "tiles");
  ASSERT_EQ(d["tiles"].size(), 2u);
  EXPECT_EQ(d["tiles"][0]["x"], 64);
  EXPECT_EQ(d["tiles"][0]["y"], 0);
  EXPECT_EQ(d["tiles"][1]["width"], 300 - 256);
  EXPECT_EQ(d["tiles"][1]["height"], 130 - 128);
  TriStateMap applied = prev;
  apply_map(applied, d);
  EXPECT_EQ(applied.data, cur.data);

  TriStateMap other(GridGeometry{0.05, 10, 10, Pose2D()}, CellState::kUnknown);
  EXPECT_TRUE(encode_map_tiles(other, cur, 0).is_null());
  EXPECT_THROW(apply_map(other, d), ProtocolError);
}

TEST(Protocol, ScanUsesNullForMissingReturns) {
  LaserScan s;
  s.ranges = {1.0, LaserScan::kNoReading};
  const Json d = encode_scan(s, Pose2D());
  EXPECT_EQ(d["ranges"][0], 1.0);
  EXPECT_TRUE(d["ranges"][1].is_null());
}

TEST(Protocol, InboundMessages) {
  auto goal = std::get<GoalMsg>(decode_inbound(R"({"topic":"goal","data":{"x":2.0,"y":1.0,"theta":0.5}})"));
  EXPECT_EQ(goal.goal, Pose2D(2.0, 1.0, 0.5));
  EXPECT_EQ(std::get<KeyMsg>(decode_inbound(R"({"topic":"key","data":{"key":"w"}})")).key, 'w');
  EXPECT_TRUE(std::holds_alternative<HeartbeatMsg>(decode_inbound(R"({"topic":"heartbeat"})")));
  EXPECT_TRUE(std::holds_alternative<ExploreMsg>(decode_inbound(R"({"topic":"explore","data":{}})")));
  EXPECT_TRUE(std::holds_alternative<StopMsg>(decode_inbound(R"({"topic":"stop"})")));

  for (const char* bad : {"not json", "[1]", R"({"data":{}})", R"({"topic":"warp"})",
                          R"({"topic":"key","data":{"key":"q"}})", R"({"topic":"key","data":{"key":"ww"}})",
                          R"({"topic":"goal","data":{"x":1}})", R"({"topic":"goal","data":{"x":"1","y":2}})"})
    EXPECT_THROW(decode_inbound(bad), ProtocolError) << bad;
}

TEST(GatewayCore, HelloAndRouting) {
  auto sys = make_system();
  GatewayCore core(sys, {});
  const auto hello = core.on_connect(1, 0.0);
  ASSERT_FALSE(hello.empty());
  const Json h = parse(hello[0]);
  EXPECT_EQ(h["topic"], "hello");
  EXPECT_EQ(h["data"]["heartbeat_interval"], 0.5);

  const auto err = core.on_message(1, "{", 0.0);
  ASSERT_EQ(err.size(), 1u);
  EXPECT_EQ(parse(err[0])["topic"], "error");

  EXPECT_TRUE(core.on_message(1, msg("goal", {{"x", 2.0}, {"y", 1.5}, {"theta", 0.0}}), 0.0).empty());
  sys.tick();
  EXPECT_EQ(sys.mode(), system::ControlMode::kNavigate);
  ASSERT_TRUE(sys.navigator().goal());
  EXPECT_EQ(sys.navigator().goal()->target, Pose2D(2.0, 1.5, 0.0));

  for (int i = 0; i < 20; ++i) sys.tick();
  const auto out = core.collect_outbound();
  EXPECT_EQ(with_topic(out, "cmd_vel").size(), 21u);
  EXPECT_EQ(with_topic(out, "pose").size(), 1u);  // latest only
  EXPECT_EQ(with_topic(out, "map").size(), 1u);
  EXPECT_EQ(with_topic(out, "scan").size(), 1u);
  EXPECT_FALSE(with_topic(out, "path").empty());
  EXPECT_FALSE(with_topic(out, "nav_status").empty());
  // A late joiner gets the whole latest map.
  const auto late = core.on_connect(2, 1.0);
  EXPECT_EQ(with_topic(late, "map").size(), 1u);
}

TEST(GatewayCore, DeadmanReleasesHeldKeyWithinOneInterval) {
  auto sys = make_system();
  GatewayCore core(sys, {});
  const double H = core.config().heartbeat_interval, dt = core.config().check_period;
  auto cmds = sys.bus().subscribe<Twist>(system::kCmdVelTopic);
  core.on_connect(7, 0.0);
  core.on_message(7, msg("key", {{"key", "w"}}), 0.0);
  double t = 0.0;
  // Healthy: heartbeats every H/2, never released.
  for (; t < 2.0 - 1e-9; t += dt) {
    if (std::fmod(t + 1e-9, H / 2) < 1e-6) core.on_message(7, msg("heartbeat"), t);
    core.check_deadman(t);
  }
  EXPECT_TRUE(core.deadman_stops().empty());
  sys.tick();
  EXPECT_GT(sys.commands().back().cmd.linear, 0.0);
  cmds.drain();

  // Heartbeats stop after the one at t = 2.0.
  core.on_message(7, msg("heartbeat"), t);
  const double last = t;
  for (; core.deadman_stops().empty() && t < last + 5.0; t += dt) core.check_deadman(t);
  ASSERT_EQ(core.deadman_stops().size(), 1u);
  const auto& s = core.deadman_stops()[0];
  EXPECT_FALSE(s.disconnected);
  EXPECT_EQ(s.last_seen, last);
  EXPECT_GE(s.wall - last, core.config().deadline() - 1e-9);
  EXPECT_LT(s.wall - last, H);
  // /cmd_vel is zeroed at once and stays zero.
  const auto seen = cmds.drain();
  ASSERT_FALSE(seen.empty());
  EXPECT_EQ(seen.back(), Twist{});
  sys.tick();
  EXPECT_EQ(sys.commands().back().cmd, Twist{});
  EXPECT_FALSE(core.teleop_held(7));
  // Released once, not on every check.
  for (int i = 0; i < 40; ++i) core.check_deadman(t += dt);
  EXPECT_EQ(core.deadman_stops().size(), 1u);
}

TEST(GatewayCore, DisconnectWhileHoldingStopsImmediately) {
  auto sys = make_system();
  GatewayCore core(sys, {});
  core.on_connect(3, 0.0);
  core.on_message(3, msg("key", {{"key", "a"}}), 0.1);
  core.on_disconnect(3, 0.2);
  ASSERT_EQ(core.deadman_stops().size(), 1u);
  EXPECT_TRUE(core.deadman_stops()[0].disconnected);
  EXPECT_EQ(core.deadman_stops()[0].wall, 0.2);
  sys.tick();
  EXPECT_EQ(sys.commands().back().cmd, Twist{});
}

TEST(GatewayCore, NoStopWithoutHeldKey) {
  auto sys = make_system();
  GatewayCore core(sys, {});
  core.on_connect(1, 0.0);
  core.on_message(1, msg("goal", {{"x", 2.0}, {"y", 1.5}}), 0.0);
  core.on_connect(2, 0.0);
  core.on_message(2, msg("key", {{"key", "w"}}), 0.0);
  core.on_message(2, msg("key", {{"key", "s"}}), 0.1);  // released by the user
  for (double t = 0; t < 3.0; t += 0.025) core.check_deadman(t);
  core.on_disconnect(1, 3.0);
  core.on_disconnect(2, 3.0);
  EXPECT_TRUE(core.deadman_stops().empty());
}

// Live websocket round trips against a running server.
namespace {

namespace beast = boost::beast;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;
using Clock = std::chrono::steady_clock;

struct WsClient {
  net::io_context ioc;
  websocket::stream<tcp::socket> ws{ioc};

  explicit WsClient(std::uint16_t port) {
    tcp::resolver r(ioc);
    net::connect(ws.next_layer(), r.resolve("127.0.0.1", std::to_string(port)));
    ws.handshake("127.0.0.1", "/");
  }
  void send(const std::string& text) { ws.write(net::buffer(text)); }
  Json read() {
    beast::flat_buffer b;
    ws.read(b);
    return Json::parse(beast::buffers_to_string(b.data()));
  }
  // Drops the TCP connection without a websocket close, as a killed tab would.
  void kill() {
    beast::error_code ec;
    ws.next_layer().shutdown(tcp::socket::shutdown_both, ec);
    ws.next_layer().close(ec);
  }
};

// Reads in the background, stamping every message on arrival.
struct Recorder {
  struct Entry {
    Clock::time_point at;
    Json msg;
  };
  WsClient client;
  std::mutex mutex;
  std::vector<Entry> log;
  std::thread thread;

  explicit Recorder(std::uint16_t port) : client(port) {
    thread = std::thread([this] {
      try {
        for (;;) {
          Json j = client.read();
          std::lock_guard lock(mutex);
          log.push_back({Clock::now(), std::move(j)});
        }
      } catch (...) {
      }
    });
  }
  ~Recorder() {
    beast::error_code ec;
    client.ws.next_layer().shutdown(tcp::socket::shutdown_both, ec);
    thread.join();
  }
  std::optional<Entry> first(const std::string& topic, Clock::time_point after, Clock::duration wait) {
    const auto end = Clock::now() + wait;
    while (Clock::now() < end) {
      {
        std::lock_guard lock(mutex);
        for (const auto& e : log)
          if (e.at >= after && e.msg["topic"] == topic) return e;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
    return std::nullopt;
  }
  bool any(const std::string& topic, const std::function<bool(const Json&)>& pred) {
    std::lock_guard lock(mutex);
    for (const auto& e : log)
      if (e.msg["topic"] == topic && pred(e.msg["data"])) return true;
    return false;
  }
};

struct LiveServer {
  system::RobotSystem sys = make_system();
  std::unique_ptr<Server> server;
  std::thread thread;

  LiveServer() {
    ServerConfig cfg;
    cfg.port = 0;
    server = std::make_unique<Server>(sys, cfg);
    thread = std::thread([this] { server->run(); });
  }
  ~LiveServer() {
    server->stop();
    thread.join();
  }
  std::uint16_t port() const { return server->port(); }
};

double seconds(Clock::duration d) { return std::chrono::duration<double>(d).count(); }

}  // namespace

TEST(GatewayServer, TeleopAndStopOnDisconnect) {
  LiveServer live;
  Recorder observer(live.port());
  WsClient teleop(live.port());
  EXPECT_EQ(teleop.read()["topic"], "hello");
  const double H = 0.5;
  const auto begin = Clock::now();
  teleop.send(msg("key", {{"key", "w"}}));
  while (Clock::now() - begin < std::chrono::milliseconds(800)) {
    teleop.send(msg("heartbeat"));
    std::this_thread::sleep_for(std::chrono::milliseconds(100));
  }
  EXPECT_TRUE(observer.any("cmd_vel", [](const Json& d) { return d["linear"].get<double>() > 0; }));
  EXPECT_EQ(live.server->deadman_stop_count(), 0u);

  const auto lost = Clock::now();
  teleop.kill();
  const auto stop = observer.first("deadman", lost, std::chrono::seconds(3));
  ASSERT_TRUE(stop);
  EXPECT_EQ(stop->msg["data"]["reason"], "disconnect");
  EXPECT_LT(seconds(stop->at - lost), H);
  const auto zero = observer.first("cmd_vel", lost, std::chrono::seconds(1));
  ASSERT_TRUE(zero);
  EXPECT_EQ(zero->msg["data"]["linear"], 0.0);
  EXPECT_EQ(zero->msg["data"]["angular"], 0.0);
  EXPECT_LT(seconds(zero->at - lost), H);
}

TEST(GatewayServer, StopWhenHeartbeatsCeaseOnOpenSocket) {
  LiveServer live;
  Recorder observer(live.port());
  WsClient teleop(live.port());
  teleop.read();
  teleop.send(msg("key", {{"key", "d"}}));
  for (int i = 0; i < 4; ++i) {
    std::this_thread::sleep_for(std::chrono::milliseconds(100));
    teleop.send(msg("heartbeat"));
  }
  const auto last = Clock::now();  // socket stays open, nothing more is sent
  const auto stop = observer.first("deadman", last, std::chrono::seconds(3));
  ASSERT_TRUE(stop);
  EXPECT_EQ(stop->msg["data"]["reason"], "heartbeat timeout");
  EXPECT_LT(seconds(stop->at - last), 0.5);
  EXPECT_EQ(live.server->deadman_stop_count(), 1u);
}

TEST(GatewayServer, MalformedMessageGetsErrorReply) {
  LiveServer live;
  WsClient c(live.port());
  EXPECT_EQ(c.read()["topic"], "hello");
  c.send(R"({"topic":"key","data":{"key":"q"}})");
  for (int i = 0; i < 200; ++i) {
    const Json j = c.read();
    if (j["topic"] == "error") {
      EXPECT_NE(j["data"]["message"].get<std::string>().find("unmapped key"), std::string::npos);
      return;
    }
  }
  FAIL() << "no error reply";
}

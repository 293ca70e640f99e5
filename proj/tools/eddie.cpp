// eddie: run the navigation stack on a simulated scenario.
//
//   eddie navigate --scenario scenarios/boxes.json --goal 5,2.5,0
//   eddie explore  --scenario scenarios/person_room.json --save-map room.pgm
//   eddie serve    --scenario scenarios/boxes.json --port 9090
//   eddie params   > my.params

#include <spdlog/spdlog.h>

#include <cstdio>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "eddie/gateway/server.hpp"
#include "eddie/mapping/mapper.hpp"
#include "eddie/system/robot_system.hpp"

using namespace eddie;

namespace {

struct Common {
  std::string scenario;
  std::string params;
  std::uint64_t seed = 1;
  std::string photo_dir = "photos";
  bool odometry_only = false;
  std::string log_level = "warn";

  void add(CLI::App* app) {
    app->add_option("--scenario", scenario, "Scenario JSON")->required()->check(CLI::ExistingFile);
    app->add_option("--params", params, "Parameter file (key: value lines)")->check(CLI::ExistingFile);
    app->add_option("--seed", seed, "Simulator seed");
    app->add_option("--photo-dir", photo_dir, "Where photo records go");
    app->add_flag("--odometry-only", odometry_only, "Localize with wheel odometry instead of the simulator pose");
    app->add_option("--log-level", log_level, "trace, debug, info, warn, error")
        ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error"}));
  }

  system::SystemConfig config() const {
    system::SystemConfig c;
    if (!params.empty()) c.params = load_params(params);
    c.seed = seed;
    c.photo_dir = photo_dir;
    c.ground_truth_localization = !odometry_only;
    return c;
  }
};

Pose2D parse_goal(const std::string& text) {
  std::stringstream ss(text);
  std::string part;
  std::vector<double> v;
  while (std::getline(ss, part, ',')) v.push_back(std::stod(part));
  if (v.size() < 2 || v.size() > 3) throw CLI::ValidationError("--goal", "expected x,y or x,y,theta");
  return Pose2D(v[0], v[1], v.size() == 3 ? v[2] : 0.0);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulated Eddie navigation stack"};
  app.require_subcommand(1);

  Common nav_opts;
  std::string goal_text;
  double nav_budget = 120.0;
  bool static_map = false;
  auto* nav = app.add_subcommand("navigate", "Drive to a goal; exit status 0 only on success");
  nav_opts.add(nav);
  nav->add_option("--goal", goal_text, "x,y[,theta] in the map frame")->required();
  nav->add_option("--budget", nav_budget, "Sim seconds before giving up");
  nav->add_flag("--static-map", static_map, "Plan on the scenario's true map instead of the live one");

  Common ex_opts;
  double ex_budget = 300.0;
  std::string save_map_path;
  auto* ex = app.add_subcommand("explore", "Explore and photograph people until no frontier is left");
  ex_opts.add(ex);
  ex->add_option("--budget", ex_budget, "Sim seconds before giving up");
  ex->add_option("--save-map", save_map_path, "Write the final map as PGM (+ .yaml)");

  Common sv_opts;
  gateway::ServerConfig server_cfg;
  auto* serve = app.add_subcommand("serve", "Websocket gateway for an operator console");
  sv_opts.add(serve);
  serve->add_option("--port", server_cfg.port, "TCP port (0 picks one)");
  serve->add_option("--address", server_cfg.address, "Listen address");
  serve->add_option("--realtime-factor", server_cfg.realtime_factor, "Sim seconds per wall second")
      ->check(CLI::PositiveNumber);
  serve->add_option("--heartbeat", server_cfg.gateway.heartbeat_interval, "Dead-man heartbeat interval, s")
      ->check(CLI::PositiveNumber);

  std::string params_in;
  auto* params_cmd = app.add_subcommand("params", "Print the full parameter set (defaults, or a file with defaults filled in)");
  params_cmd->add_option("file", params_in, "Parameter file")->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*params_cmd) {
      std::cout << format_params(params_in.empty() ? ParamSet{} : load_params(params_in));
      return 0;
    }

    if (*nav) {
      spdlog::set_level(spdlog::level::from_str(nav_opts.log_level));
      auto cfg = nav_opts.config();
      cfg.static_map = static_map;
      const Pose2D goal = parse_goal(goal_text);
      system::RobotSystem sys(sim::load_scenario(nav_opts.scenario), cfg);
      sys.set_goal(goal);
      sys.run_until([&] { return !sys.navigator().active(); }, nav_budget);
      const auto& st = sys.navigator().status();
      const Pose2D gt = sys.sim().ground_truth();
      std::printf("state=%s reason=\"%s\" t=%.2f pose=(%.3f, %.3f, %.3f) error=%.3f m recoveries=%d collided=%s\n",
                  nav::to_string(st.state), st.reason.c_str(), sys.time(), gt.x, gt.y, gt.theta, distance(gt, goal),
                  sys.navigator().recoveries(), sys.collided() ? "yes" : "no");
      return st.state == nav::NavState::kSucceeded ? 0 : 1;
    }

    if (*ex) {
      spdlog::set_level(spdlog::level::from_str(ex_opts.log_level));
      system::RobotSystem sys(sim::load_scenario(ex_opts.scenario), ex_opts.config());
      sys.start_exploration();
      sys.run_until([&] { return sys.behavior().mode == behaviors::Mode::kIdle; }, ex_budget);
      for (const auto& p : sys.photos())
        std::printf("photo %d person=%s t=%.2f robot=(%.3f, %.3f) saved=%s\n", p.sequence, p.person_id.c_str(), p.stamp,
                    p.robot_pose.x, p.robot_pose.y, p.saved ? "yes" : "no");
      const auto frontiers = sys.frontiers();
      std::printf("mode=%s t=%.2f frontiers=%zu photos=%zu collided=%s\n", behaviors::to_string(sys.behavior().mode),
                  sys.time(), frontiers.size(), sys.photos().size(), sys.collided() ? "yes" : "no");
      if (!save_map_path.empty()) mapping::save_map(sys.live_map(), save_map_path);
      return sys.behavior().mode == behaviors::Mode::kIdle && frontiers.empty() && !sys.collided() ? 0 : 1;
    }

    if (*serve) {
      spdlog::set_level(spdlog::level::from_str(sv_opts.log_level == "warn" ? "info" : sv_opts.log_level));
      system::RobotSystem sys(sim::load_scenario(sv_opts.scenario), sv_opts.config());
      server_cfg.stop_on_signal = true;
      gateway::Server server(sys, server_cfg);
      std::printf("listening on ws://%s:%u\n", server_cfg.address.c_str(), server.port());
      std::fflush(stdout);
      server.run();
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "eddie: %s\n", e.what());
    return 2;
  }
  return 0;
}

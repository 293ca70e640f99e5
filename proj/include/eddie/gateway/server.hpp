#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <string>

#include "eddie/gateway/gateway.hpp"

namespace eddie::gateway {

struct ServerConfig {
  std::string address = "127.0.0.1";
  std::uint16_t port = 9090;  // 0 picks a free port
  // Sim seconds per wall second. The system ticks on a wall timer.
  double realtime_factor = 1.0;
  GatewayConfig gateway;
  bool stop_on_signal = false;  // SIGINT/SIGTERM end run()
};

// Websocket server in front of a RobotSystem. One io_context thread runs the
// sessions, the control ticks and the dead-man checks, so the system is never
// touched concurrently.
class Server {
 public:
  // Binds and listens immediately; throws std::system_error on failure.
  Server(system::RobotSystem& system, ServerConfig config);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  std::uint16_t port() const;
  // Serves until stop(). Call from one thread only.
  void run();
  // Safe from any thread.
  void stop();

  // Safe from any thread.
  std::size_t deadman_stop_count() const;
  std::size_t connected_clients() const;
  // Only while run() is not executing.
  const GatewayCore& core() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace eddie::gateway

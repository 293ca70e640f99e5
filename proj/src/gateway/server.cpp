#include "eddie/gateway/server.hpp"

#include <spdlog/spdlog.h>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>
#include <chrono>
#include <deque>
#include <map>
#include <optional>
#include <stdexcept>

namespace eddie::gateway {

namespace beast = boost::beast;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;
using Clock = std::chrono::steady_clock;

namespace {

class Session;

struct Hooks {
  virtual ~Hooks() = default;
  virtual void connected(const std::shared_ptr<Session>& s) = 0;
  virtual void message(const std::shared_ptr<Session>& s, std::string_view text) = 0;
  virtual void disconnected(ClientId id) = 0;
};

class Session : public std::enable_shared_from_this<Session> {
 public:
  Session(tcp::socket socket, Hooks& hooks, ClientId id) : ws_(std::move(socket)), hooks_(hooks), id_(id) {}

  ClientId id() const { return id_; }

  void start() {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept([self = shared_from_this()](beast::error_code ec) {
      if (ec) return;
      self->open_ = true;
      self->hooks_.connected(self);
      self->read();
    });
  }

  void send(std::string text) {
    if (!open_) return;
    queue_.push_back(std::move(text));
    if (queue_.size() == 1) write();
  }

 private:
  void read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        self->close();
        return;
      }
      const std::string text = beast::buffers_to_string(self->buffer_.data());
      self->buffer_.consume(self->buffer_.size());
      self->hooks_.message(self, text);
      self->read();
    });
  }

  void write() {
    ws_.text(true);
    ws_.async_write(net::buffer(queue_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        self->close();
        return;
      }
      self->queue_.pop_front();
      if (!self->queue_.empty()) self->write();
    });
  }

  void close() {
    if (!open_) return;
    open_ = false;
    queue_.clear();
    hooks_.disconnected(id_);
  }

  websocket::stream<beast::tcp_stream> ws_;
  beast::flat_buffer buffer_;
  std::deque<std::string> queue_;
  Hooks& hooks_;
  ClientId id_;
  bool open_ = false;
};

}  // namespace

struct Server::Impl : Hooks {
  Impl(system::RobotSystem& sys, ServerConfig cfg)
      : config(cfg),
        system(sys),
        core(sys, cfg.gateway),
        acceptor(ioc),
        tick_timer(ioc),
        check_timer(ioc),
        start(Clock::now()) {
    if (!(cfg.realtime_factor > 0.0)) throw std::invalid_argument("realtime factor must be > 0");
    if (!(cfg.gateway.heartbeat_interval > 0.0) || !(cfg.gateway.check_period > 0.0))
      throw std::invalid_argument("heartbeat interval and check period must be > 0");
    const tcp::endpoint ep(net::ip::make_address(cfg.address), cfg.port);
    acceptor.open(ep.protocol());
    acceptor.set_option(net::socket_base::reuse_address(true));
    acceptor.bind(ep);
    acceptor.listen();
  }

  double wall() const { return std::chrono::duration<double>(Clock::now() - start).count(); }

  void accept() {
    acceptor.async_accept([this](beast::error_code ec, tcp::socket socket) {
      if (ec) return;
      std::make_shared<Session>(std::move(socket), *this, next_id++)->start();
      accept();
    });
  }

  void schedule_tick() {
    const auto period = std::chrono::duration_cast<Clock::duration>(
        std::chrono::duration<double>(system.period() / config.realtime_factor));
    next_tick += period;
    // Behind by more than a period (slow tick): skip ahead, don't burst.
    if (next_tick + period < Clock::now()) next_tick = Clock::now();
    tick_timer.expires_at(next_tick);
    tick_timer.async_wait([this](beast::error_code ec) {
      if (ec) return;
      system.tick();
      flush();
      schedule_tick();
    });
  }

  void schedule_check() {
    check_timer.expires_after(std::chrono::duration_cast<Clock::duration>(
        std::chrono::duration<double>(config.gateway.check_period)));
    check_timer.async_wait([this](beast::error_code ec) {
      if (ec) return;
      core.check_deadman(wall());
      report_stops();
      schedule_check();
    });
  }

  void broadcast(const std::string& text) {
    for (auto it = sessions.begin(); it != sessions.end();) {
      if (auto s = it->second.lock()) {
        s->send(text);
        ++it;
      } else {
        it = sessions.erase(it);
      }
    }
  }

  void flush() {
    for (const auto& m : core.collect_outbound()) broadcast(m);
  }

  // Announces new dead-man stops and pushes the zero command out at once.
  void report_stops() {
    const auto& stops = core.deadman_stops();
    if (reported == stops.size()) return;
    for (; reported < stops.size(); ++reported) {
      const auto& s = stops[reported];
      broadcast(envelope("deadman", {{"client", s.client},
                                     {"reason", s.disconnected ? "disconnect" : "heartbeat timeout"},
                                     {"silence", s.wall - s.last_seen},
                                     {"stamp", system.time()}}));
    }
    stop_count.store(stops.size());
    flush();
  }

  void connected(const std::shared_ptr<Session>& s) override {
    sessions[s->id()] = s;
    client_count.store(sessions.size());
    for (auto& m : core.on_connect(s->id(), wall())) s->send(std::move(m));
  }

  void message(const std::shared_ptr<Session>& s, std::string_view text) override {
    for (auto& m : core.on_message(s->id(), text, wall())) s->send(std::move(m));
  }

  void disconnected(ClientId id) override {
    sessions.erase(id);
    client_count.store(sessions.size());
    core.on_disconnect(id, wall());
    report_stops();
  }

  ServerConfig config;
  system::RobotSystem& system;
  GatewayCore core;
  net::io_context ioc{1};
  tcp::acceptor acceptor;
  net::steady_timer tick_timer;
  net::steady_timer check_timer;
  Clock::time_point start;
  Clock::time_point next_tick;
  std::map<ClientId, std::weak_ptr<Session>> sessions;
  ClientId next_id = 1;
  std::size_t reported = 0;
  std::atomic<std::size_t> stop_count{0};
  std::atomic<std::size_t> client_count{0};
};

Server::Server(system::RobotSystem& system, ServerConfig config)
    : impl_(std::make_unique<Impl>(system, std::move(config))) {}

Server::~Server() = default;

std::uint16_t Server::port() const { return impl_->acceptor.local_endpoint().port(); }

void Server::run() {
  spdlog::info("gateway listening on ws://{}:{}", impl_->config.address, port());
  impl_->accept();
  impl_->next_tick = Clock::now();
  impl_->schedule_tick();
  impl_->schedule_check();
  std::optional<net::signal_set> signals;
  if (impl_->config.stop_on_signal) {
    signals.emplace(impl_->ioc, SIGINT, SIGTERM);
    signals->async_wait([this](beast::error_code ec, int) {
      if (!ec) impl_->ioc.stop();
    });
  }
  impl_->ioc.run();
}

void Server::stop() { impl_->ioc.stop(); }

std::size_t Server::deadman_stop_count() const { return impl_->stop_count.load(); }
std::size_t Server::connected_clients() const { return impl_->client_count.load(); }
const GatewayCore& Server::core() const { return impl_->core; }

}  // namespace eddie::gateway

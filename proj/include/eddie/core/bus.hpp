#pragma once

#include <any>
#include <atomic>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <typeindex>
#include <vector>

namespace eddie {

class BusError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Logical simulation time. Only moves forward.
class SimClock {
 public:
  double now() const { return now_.load(); }
  void advance_to(double t) {
    if (t < now_.load()) throw BusError("sim clock cannot run backwards");
    now_.store(t);
  }

 private:
  std::atomic<double> now_{0.0};
};

namespace detail {
struct SubscriberQueue {
  explicit SubscriberQueue(std::size_t bound_) : bound(bound_) {}
  std::mutex mutex;
  std::deque<std::any> items;
  std::size_t bound;
  std::size_t dropped = 0;
};
}  // namespace detail

template <typename T>
class Subscription {
 public:
  Subscription() = default;
  explicit Subscription(std::shared_ptr<detail::SubscriberQueue> q) : queue_(std::move(q)) {}

  std::optional<T> poll() {
    std::lock_guard lock(queue_->mutex);
    if (queue_->items.empty()) return std::nullopt;
    T msg = std::any_cast<T>(std::move(queue_->items.front()));
    queue_->items.pop_front();
    return msg;
  }

  std::vector<T> drain() {
    std::lock_guard lock(queue_->mutex);
    std::vector<T> out;
    out.reserve(queue_->items.size());
    for (auto& item : queue_->items) out.push_back(std::any_cast<T>(std::move(item)));
    queue_->items.clear();
    return out;
  }

  // Latest message, discarding anything older.
  std::optional<T> latest() {
    std::lock_guard lock(queue_->mutex);
    if (queue_->items.empty()) return std::nullopt;
    T msg = std::any_cast<T>(std::move(queue_->items.back()));
    queue_->items.clear();
    return msg;
  }

  std::size_t pending() const {
    std::lock_guard lock(queue_->mutex);
    return queue_->items.size();
  }
  // Messages discarded because the queue was full (oldest first).
  std::size_t dropped() const {
    std::lock_guard lock(queue_->mutex);
    return queue_->dropped;
  }
  bool valid() const { return queue_ != nullptr; }

 private:
  std::shared_ptr<detail::SubscriberQueue> queue_;
};

// In-process topic bus. Each topic is registered with one message type;
// every subscriber gets its own bounded FIFO. Publishing is thread-safe.
class TopicBus {
 public:
  static constexpr std::size_t kDefaultQueueBound = 1024;

  template <typename T>
  void advertise(const std::string& topic) {
    std::unique_lock lock(mutex_);
    auto it = topics_.find(topic);
    if (it == topics_.end()) {
      topics_.emplace(topic, Topic{std::type_index(typeid(T)), {}});
    } else if (it->second.type != std::type_index(typeid(T))) {
      throw BusError("topic '" + topic + "' already registered with another type");
    }
  }

  template <typename T>
  void publish(const std::string& topic, const T& msg) {
    std::shared_lock lock(mutex_);
    auto it = topics_.find(topic);
    if (it == topics_.end()) throw BusError("publish to unregistered topic '" + topic + "'");
    if (it->second.type != std::type_index(typeid(T))) throw BusError("message type mismatch on topic '" + topic + "'");
    for (const auto& q : it->second.subscribers) {
      std::lock_guard qlock(q->mutex);
      if (q->items.size() >= q->bound) {
        q->items.pop_front();
        ++q->dropped;
      }
      q->items.emplace_back(msg);
    }
  }

  template <typename T>
  Subscription<T> subscribe(const std::string& topic, std::size_t queue_bound = kDefaultQueueBound) {
    std::unique_lock lock(mutex_);
    auto it = topics_.find(topic);
    if (it == topics_.end()) throw BusError("subscribe to unregistered topic '" + topic + "'");
    if (it->second.type != std::type_index(typeid(T))) throw BusError("subscription type mismatch on topic '" + topic + "'");
    if (queue_bound == 0) throw BusError("queue bound must be > 0");
    auto q = std::make_shared<detail::SubscriberQueue>(queue_bound);
    it->second.subscribers.push_back(q);
    return Subscription<T>(q);
  }

  bool has_topic(const std::string& topic) const {
    std::shared_lock lock(mutex_);
    return topics_.count(topic) > 0;
  }

  SimClock& clock() { return clock_; }
  const SimClock& clock() const { return clock_; }

 private:
  struct Topic {
    std::type_index type;
    std::vector<std::shared_ptr<detail::SubscriberQueue>> subscribers;
  };

  mutable std::shared_mutex mutex_;
  std::map<std::string, Topic> topics_;
  SimClock clock_;
};

}  // namespace eddie

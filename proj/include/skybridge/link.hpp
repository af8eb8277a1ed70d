// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <mutex>
#include <optional>
#include <random>

#include "skybridge/clock.hpp"

namespace skybridge {

// Fixed delay plus uniform jitter standing in for the UAV -> remote
// controller -> phone hops. Deliveries stay FIFO: a draw that would land
// before the previous delivery is pushed up to it.
struct LinkModel {
  double base_delay_ms = 0;
  double jitter_ms = 0;
  bool delay_commands = false;  // frames are always delayed; commands optionally
};

class LinkScheduler {
 public:
  LinkScheduler(const LinkModel& model, uint64_t seed)
      : model_(model), rng_(seed) {}

  // delivery = now + base + uniform(-jitter, +jitter), monotonized.
  uint64_t delivery_for(uint64_t now_us) {
    double offset_ms = model_.base_delay_ms;
    if (model_.jitter_ms > 0) {
      std::uniform_real_distribution<double> jitter(-model_.jitter_ms, model_.jitter_ms);
      offset_ms += jitter(rng_);
    }
    const int64_t offset_us = static_cast<int64_t>(std::llround(offset_ms * 1000.0));
    int64_t delivery = static_cast<int64_t>(now_us) + offset_us;
    if (delivery < 0) delivery = 0;
    uint64_t ts = static_cast<uint64_t>(delivery);
    if (ts < last_delivery_us_) ts = last_delivery_us_;
    last_delivery_us_ = ts;
    return ts;
  }

  const LinkModel& model() const { return model_; }

 private:
  LinkModel model_;
  std::mt19937_64 rng_;
  uint64_t last_delivery_us_ = 0;
};

// Thread-safe FIFO whose items become visible only at their delivery
// timestamp (wall clock). Used by the live link threads; simulated-time
// runs schedule timeline events instead. A capacity bound drops the oldest
// entry so a stalled consumer cannot grow the backlog.
template <typename T>
class DelayedQueue {
 public:
  explicit DelayedQueue(size_t max_items = 0) : max_items_(max_items) {}

  void push(uint64_t delivery_ts_us, T item) {
    {
      std::lock_guard lock(mutex_);
      if (closed_) return;
      if (max_items_ > 0 && items_.size() >= max_items_) {
        items_.pop_front();
        ++dropped_;
      }
      items_.push_back({delivery_ts_us, std::move(item)});
    }
    cv_.notify_one();
  }

  uint64_t dropped() const {
    std::lock_guard lock(mutex_);
    return dropped_;
  }

  // Blocks until the front item is due or the queue is closed. Returns
  // nullopt only when closed and drained.
  std::optional<T> pop_due() {
    std::unique_lock lock(mutex_);
    for (;;) {
      if (items_.empty()) {
        if (closed_) return std::nullopt;
        cv_.wait(lock);
        continue;
      }
      const uint64_t due = items_.front().delivery_ts_us;
      const uint64_t now = wall_now_us();
      if (closed_ || now >= due) {
        T item = std::move(items_.front().item);
        items_.pop_front();
        return item;
      }
      cv_.wait_for(lock, std::chrono::microseconds(due - now));
    }
  }

  void close() {
    {
      std::lock_guard lock(mutex_);
      closed_ = true;
    }
    cv_.notify_all();
  }

  size_t size() const {
    std::lock_guard lock(mutex_);
    return items_.size();
  }

 private:
  struct Entry {
    uint64_t delivery_ts_us;
    T item;
  };

  mutable std::mutex mutex_;
  std::condition_variable cv_;
  std::deque<Entry> items_;
  size_t max_items_;
  uint64_t dropped_ = 0;
  bool closed_ = false;
};

}  // namespace skybridge

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <vector>

#include "skybridge/clock.hpp"

namespace skybridge {

// Single-threaded discrete-event scheduler for simulated-time runs. Events
// fire in (due time, insertion order), which makes whole runs reproducible
// bit for bit under a fixed seed.
class SimTimeline {
 public:
  uint64_t now_us() const { return now_us_; }

  void at(uint64_t due_us, std::function<void()> fn) {
    heap_.push(Event{due_us < now_us_ ? now_us_ : due_us, next_order_++, std::move(fn)});
  }

  void in(uint64_t delta_us, std::function<void()> fn) {
    at(now_us_ + delta_us, std::move(fn));
  }

  // Runs every event due at or before end_us, then advances now to end_us.
  void run_until(uint64_t end_us) {
    while (!stopped_ && !heap_.empty() && heap_.top().due_us <= end_us) {
      Event event = heap_.top();
      heap_.pop();
      now_us_ = event.due_us;
      event.fn();
    }
    if (!stopped_ && now_us_ < end_us) now_us_ = end_us;
  }

  void run_all() {
    while (!stopped_ && !heap_.empty()) {
      Event event = heap_.top();
      heap_.pop();
      now_us_ = event.due_us;
      event.fn();
    }
  }

  void request_stop() { stopped_ = true; }
  bool stopped() const { return stopped_; }

 private:
  struct Event {
    uint64_t due_us;
    uint64_t order;
    std::function<void()> fn;

    bool operator>(const Event& other) const {
      if (due_us != other.due_us) return due_us > other.due_us;
      return order > other.order;
    }
  };

  std::priority_queue<Event, std::vector<Event>, std::greater<>> heap_;
  uint64_t now_us_ = 0;
  uint64_t next_order_ = 0;
  bool stopped_ = false;
};

// Clock view over the timeline, handed to components that stamp timestamps.
class TimelineClock final : public Clock {
 public:
  explicit TimelineClock(const SimTimeline& timeline) : timeline_(timeline) {}
  uint64_t now_us() override { return timeline_.now_us(); }

 private:
  const SimTimeline& timeline_;
};

}  // namespace skybridge

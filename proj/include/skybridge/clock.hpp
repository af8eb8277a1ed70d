// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <cstdint>

namespace skybridge {

// Single time source per run: either the host monotonic clock (live) or a
// simulated clock driven by the event timeline. Timestamps are microseconds
// and are only comparable within one host / one run.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual uint64_t now_us() = 0;
};

inline uint64_t wall_now_us() {
  return static_cast<uint64_t>(
      std::chrono::duration_cast<std::chrono::microseconds>(
          std::chrono::steady_clock::now().time_since_epoch())
          .count());
}

class WallClock final : public Clock {
 public:
  uint64_t now_us() override { return wall_now_us(); }
};

class SimClock final : public Clock {
 public:
  uint64_t now_us() override { return t_us_; }
  void set(uint64_t t_us) { t_us_ = t_us; }

 private:
  uint64_t t_us_ = 0;
};

}  // namespace skybridge

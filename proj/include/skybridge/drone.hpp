// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>

namespace skybridge {

struct Vec3 {
  double x = 0;
  double y = 0;
  double z = 0;

  bool operator==(const Vec3&) const = default;
};

// Body-frame stick input: X forward (pitch), Y right (roll), Z down
// (vertical), yaw about Z. Components outside [-1, 1] are rejected, not
// clamped.
struct VirtualStickCommand {
  float roll = 0;
  float pitch = 0;
  float yaw_rate = 0;
  float vertical = 0;

  bool valid() const;
};

struct GimbalCommand {
  float pitch_deg = 0;    // target, [-90, +30]
  float speed_deg_s = 0;  // > 0

  bool valid() const;
};

enum class FlightMode : uint8_t { kNormal = 0, kFailsafeHover = 1 };

struct DroneState {
  Vec3 position;            // meters, world frame (z positive down)
  double yaw_deg = 0;       // [0, 360)
  Vec3 velocity;            // m/s, world frame
  double gimbal_pitch_deg = 0;
  FlightMode mode = FlightMode::kNormal;
  uint64_t last_cmd_ts_us = 0;
};

// Velocity-mode stick mapping; round numbers near Phantom-class limits.
inline constexpr double kMaxHorizontalSpeedMs = 10.0;
inline constexpr double kMaxVerticalSpeedMs = 4.0;
inline constexpr double kMaxYawRateDps = 100.0;

// Command-rate contract: below 5 Hz trips the failsafe, above 25 Hz the
// newest command wins each window.
inline constexpr uint64_t kWatchdogTimeoutUs = 200'000;
inline constexpr uint64_t kCommandCoalesceUs = 40'000;
inline constexpr int kRecoveryGoodIntervals = 3;

inline constexpr double kGimbalMinDeg = -90.0;
inline constexpr double kGimbalMaxDeg = 30.0;

double normalize_yaw_deg(double yaw_deg);

// One kinematic step: yaw integrates first, the body velocity
// (pitch*10, roll*10, vertical*4) m/s is rotated about Z by the new yaw,
// and position integrates over dt seconds. Preconditions: dt in (0, 0.5],
// cmd valid, state.mode == kNormal; violations throw std::invalid_argument.
DroneState apply_command(const DroneState& state, const VirtualStickCommand& cmd,
                         double dt_s);

// Polling form of the low-rate watchdog: a gap beyond 200 ms since the last
// command zeroes velocity and enters FAILSAFE_HOVER.
DroneState watchdog_check(const DroneState& state, uint64_t now_us);

// Slews the gimbal toward cmd.pitch_deg at cmd.speed_deg_s, saturating at
// the target, clamped to [-90, +30]. Invalid commands throw.
DroneState apply_gimbal(const DroneState& state, const GimbalCommand& cmd, double dt_s);

// Exact-time drone simulation core. advance_to() integrates state up to a
// timestamp, splitting precisely at the watchdog deadline and at deferred
// command applications, so results do not depend on how often callers tick.
// Not thread safe; live runners serialize access externally.
class DroneCore {
 public:
  DroneCore(uint64_t start_ts_us, DroneState initial = {});

  // Command arrival (already decoded). Invalid commands are counted and
  // ignored. Arrivals faster than 25 Hz are coalesced latest-wins; in
  // FAILSAFE_HOVER arrivals only feed the recovery counter until three
  // consecutive good intervals restore NORMAL.
  void submit_virtual_stick(const VirtualStickCommand& cmd, uint64_t t_us);
  void submit_gimbal(const GimbalCommand& cmd, uint64_t t_us);

  void advance_to(uint64_t t_us);

  const DroneState& state() const { return state_; }
  uint64_t last_update_us() const { return last_update_us_; }
  uint64_t rejected_commands() const { return rejected_commands_; }
  uint64_t applied_commands() const { return applied_commands_; }

 private:
  void integrate(uint64_t until_us);
  void apply_active(double dt_s);
  void trip_failsafe();

  DroneState state_;
  uint64_t last_update_us_;

  VirtualStickCommand active_cmd_{};
  std::optional<VirtualStickCommand> pending_cmd_;
  uint64_t pending_due_us_ = 0;
  uint64_t last_applied_us_ = 0;
  bool has_applied_ = false;

  int good_intervals_ = 0;

  double gimbal_target_deg_ = 0;
  double gimbal_speed_dps_ = 0;

  uint64_t rejected_commands_ = 0;
  uint64_t applied_commands_ = 0;
};

}  // namespace skybridge

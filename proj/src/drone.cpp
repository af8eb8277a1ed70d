// SPDX-License-Identifier: Apache-2.0
#include "skybridge/drone.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "skybridge/log.hpp"

namespace skybridge {

namespace {

constexpr double kDegToRad = 3.14159265358979323846 / 180.0;
constexpr uint64_t kMaxIntegrationStepUs = 100'000;  // keeps dt within (0, 0.5]

double slew_toward(double current, double target, double speed_dps, double dt_s) {
  const double max_move = speed_dps * dt_s;
  const double delta = target - current;
  double next = current;
  if (std::abs(delta) <= max_move) {
    next = target;
  } else {
    next = current + (delta > 0 ? max_move : -max_move);
  }
  return std::clamp(next, kGimbalMinDeg, kGimbalMaxDeg);
}

}  // namespace

bool VirtualStickCommand::valid() const {
  const auto in_range = [](float v) { return v >= -1.0f && v <= 1.0f && std::isfinite(v); };
  return in_range(roll) && in_range(pitch) && in_range(yaw_rate) && in_range(vertical);
}

bool GimbalCommand::valid() const {
  return std::isfinite(pitch_deg) && pitch_deg >= kGimbalMinDeg &&
         pitch_deg <= kGimbalMaxDeg && std::isfinite(speed_deg_s) && speed_deg_s > 0;
}

double normalize_yaw_deg(double yaw_deg) {
  double yaw = std::fmod(yaw_deg, 360.0);
  if (yaw < 0) yaw += 360.0;
  if (yaw >= 360.0) yaw = 0.0;
  return yaw;
}

DroneState apply_command(const DroneState& state, const VirtualStickCommand& cmd,
                         double dt_s) {
  if (!(dt_s > 0.0 && dt_s <= 0.5)) {
    throw std::invalid_argument("apply_command: dt must be in (0, 0.5]");
  }
  if (!cmd.valid()) {
    throw std::invalid_argument("apply_command: stick components must be in [-1, 1]");
  }
  if (state.mode != FlightMode::kNormal) {
    throw std::invalid_argument("apply_command: drone not in NORMAL mode");
  }

  DroneState out = state;
  out.yaw_deg = normalize_yaw_deg(state.yaw_deg + cmd.yaw_rate * kMaxYawRateDps * dt_s);

  const double body_vx = cmd.pitch * kMaxHorizontalSpeedMs;
  const double body_vy = cmd.roll * kMaxHorizontalSpeedMs;
  const double body_vz = cmd.vertical * kMaxVerticalSpeedMs;

  const double yaw_rad = out.yaw_deg * kDegToRad;
  const double cos_yaw = std::cos(yaw_rad);
  const double sin_yaw = std::sin(yaw_rad);
  out.velocity.x = body_vx * cos_yaw - body_vy * sin_yaw;
  out.velocity.y = body_vx * sin_yaw + body_vy * cos_yaw;
  out.velocity.z = body_vz;

  out.position.x += out.velocity.x * dt_s;
  out.position.y += out.velocity.y * dt_s;
  out.position.z += out.velocity.z * dt_s;
  return out;
}

DroneState watchdog_check(const DroneState& state, uint64_t now_us) {
  DroneState out = state;
  if (out.mode == FlightMode::kNormal && now_us > out.last_cmd_ts_us &&
      now_us - out.last_cmd_ts_us > kWatchdogTimeoutUs) {
    out.mode = FlightMode::kFailsafeHover;
    out.velocity = {};
  }
  return out;
}

DroneState apply_gimbal(const DroneState& state, const GimbalCommand& cmd, double dt_s) {
  if (!cmd.valid()) {
    throw std::invalid_argument("apply_gimbal: target out of [-90, +30] or speed <= 0");
  }
  if (dt_s < 0) {
    throw std::invalid_argument("apply_gimbal: dt must be >= 0");
  }
  DroneState out = state;
  out.gimbal_pitch_deg = slew_toward(state.gimbal_pitch_deg, cmd.pitch_deg,
                                     cmd.speed_deg_s, dt_s);
  return out;
}

DroneCore::DroneCore(uint64_t start_ts_us, DroneState initial)
    : state_(initial), last_update_us_(start_ts_us) {
  state_.last_cmd_ts_us = start_ts_us;  // watchdog armed from creation
  gimbal_target_deg_ = state_.gimbal_pitch_deg;
}

void DroneCore::submit_virtual_stick(const VirtualStickCommand& cmd, uint64_t t_us) {
  advance_to(t_us);
  if (!cmd.valid()) {
    ++rejected_commands_;
    log_warn("drone", "rejected out-of-range virtual stick command");
    return;
  }

  const uint64_t prev_arrival = state_.last_cmd_ts_us;
  const bool good_gap = t_us >= prev_arrival && t_us - prev_arrival <= kWatchdogTimeoutUs;
  state_.last_cmd_ts_us = t_us;

  if (state_.mode == FlightMode::kFailsafeHover) {
    good_intervals_ = good_gap ? good_intervals_ + 1 : 0;
    if (good_intervals_ < kRecoveryGoodIntervals) return;  // still ignored
    state_.mode = FlightMode::kNormal;
    good_intervals_ = 0;
    log_info("drone", "command rate recovered, leaving FAILSAFE_HOVER");
  }

  if (!has_applied_ || t_us - last_applied_us_ >= kCommandCoalesceUs) {
    active_cmd_ = cmd;
    has_applied_ = true;
    last_applied_us_ = t_us;
    ++applied_commands_;
    pending_cmd_.reset();
  } else {
    // Faster than 25 Hz: coalesce, newest replaces the pending one.
    pending_cmd_ = cmd;
    pending_due_us_ = last_applied_us_ + kCommandCoalesceUs;
  }
}

void DroneCore::submit_gimbal(const GimbalCommand& cmd, uint64_t t_us) {
  advance_to(t_us);
  if (!cmd.valid()) {
    ++rejected_commands_;
    log_warn("drone", "rejected out-of-range gimbal command");
    return;
  }
  gimbal_target_deg_ = cmd.pitch_deg;
  gimbal_speed_dps_ = cmd.speed_deg_s;
}

void DroneCore::advance_to(uint64_t t_us) {
  for (;;) {
    // Consume events due at the current instant before integrating further.
    if (state_.mode == FlightMode::kNormal) {
      if (pending_cmd_ && pending_due_us_ <= last_update_us_) {
        active_cmd_ = *pending_cmd_;
        pending_cmd_.reset();
        last_applied_us_ = pending_due_us_;
        has_applied_ = true;
        ++applied_commands_;
      }
      const uint64_t deadline = state_.last_cmd_ts_us + kWatchdogTimeoutUs;
      if (deadline <= last_update_us_) trip_failsafe();
    }
    if (last_update_us_ >= t_us) break;

    uint64_t next = t_us;
    if (state_.mode == FlightMode::kNormal) {
      if (pending_cmd_) {
        next = std::min(next, std::max(pending_due_us_, last_update_us_));
      }
      const uint64_t deadline = state_.last_cmd_ts_us + kWatchdogTimeoutUs;
      next = std::min(next, std::max(deadline, last_update_us_));
    }
    if (next > last_update_us_) integrate(next);
  }
}

void DroneCore::integrate(uint64_t until_us) {
  uint64_t remaining = until_us - last_update_us_;
  while (remaining > 0) {
    const uint64_t step_us = std::min(remaining, kMaxIntegrationStepUs);
    const double dt_s = static_cast<double>(step_us) * 1e-6;
    if (state_.mode == FlightMode::kNormal) {
      const uint64_t keep_last_cmd = state_.last_cmd_ts_us;
      state_ = apply_command(state_, active_cmd_, dt_s);
      state_.last_cmd_ts_us = keep_last_cmd;
    }
    state_.gimbal_pitch_deg =
        slew_toward(state_.gimbal_pitch_deg, gimbal_target_deg_, gimbal_speed_dps_, dt_s);
    remaining -= step_us;
  }
  last_update_us_ = until_us;
}

void DroneCore::trip_failsafe() {
  state_.mode = FlightMode::kFailsafeHover;
  state_.velocity = {};
  pending_cmd_.reset();
  good_intervals_ = 0;
  log_info("drone", "command rate below 5 Hz, entering FAILSAFE_HOVER");
}

}  // namespace skybridge

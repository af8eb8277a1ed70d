#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <complex>
#include <random>

#include "skybridge/drone.hpp"

using namespace skybridge;

namespace {

// Independent kinematics reference: the body->world rotation is done with
// complex multiplication instead of an explicit rotation matrix.
DroneState reference_step(const DroneState& state, const VirtualStickCommand& cmd,
                          double dt_s) {
  DroneState out = state;
  double yaw = state.yaw_deg + cmd.yaw_rate * 100.0 * dt_s;
  yaw = std::fmod(yaw, 360.0);
  if (yaw < 0) yaw += 360.0;
  if (yaw >= 360.0) yaw = 0.0;
  out.yaw_deg = yaw;

  const std::complex<double> body(cmd.pitch * 10.0, cmd.roll * 10.0);
  const std::complex<double> rotated =
      body * std::polar(1.0, yaw * std::acos(-1.0) / 180.0);
  out.velocity = {rotated.real(), rotated.imag(), cmd.vertical * 4.0};
  out.position.x += out.velocity.x * dt_s;
  out.position.y += out.velocity.y * dt_s;
  out.position.z += out.velocity.z * dt_s;
  return out;
}

VirtualStickCommand random_cmd(std::mt19937_64& rng) {
  std::uniform_real_distribution<float> dist(-1.0f, 1.0f);
  return {dist(rng), dist(rng), dist(rng), dist(rng)};
}

}  // namespace

TEST_CASE("zero command is a hover fixed point") {
  DroneState state;
  state.position = {3, -4, 5};
  state.yaw_deg = 123;
  for (double dt : {0.01, 0.1, 0.5}) {
    const DroneState next = apply_command(state, {}, dt);
    CHECK(next.position == state.position);
    CHECK(next.yaw_deg == state.yaw_deg);
    CHECK(next.velocity == Vec3{});
  }
}

TEST_CASE("pure yaw command turns without translating") {
  DroneState state;
  const DroneState next = apply_command(state, {0, 0, 1, 0}, 0.1);
  CHECK(next.yaw_deg == doctest::Approx(10.0));
  CHECK(next.position == Vec3{});
}

TEST_CASE("full pitch at yaw 90 displaces along world +Y") {
  // One second of full forward stick, stepped within the dt precondition.
  DroneState state;
  state.yaw_deg = 90.0;
  state = apply_command(state, {0, 1, 0, 0}, 0.5);
  state = apply_command(state, {0, 1, 0, 0}, 0.5);
  CHECK(state.position.x == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(state.position.y == doctest::Approx(10.0));
  CHECK(state.position.z == doctest::Approx(0.0));
}

TEST_CASE("apply_command validates its inputs") {
  DroneState state;
  CHECK_THROWS_AS(apply_command(state, {2.0f, 0, 0, 0}, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(apply_command(state, {}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(apply_command(state, {}, 0.6), std::invalid_argument);
  state.mode = FlightMode::kFailsafeHover;
  CHECK_THROWS_AS(apply_command(state, {}, 0.1), std::invalid_argument);
}

TEST_CASE("kinematics agree with the independent rotation reference") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> pos(-100, 100);
  std::uniform_real_distribution<double> yaw(0, 360);
  std::uniform_real_distribution<double> dt(0.001, 0.5);
  for (int i = 0; i < 1000; ++i) {
    DroneState state;
    state.position = {pos(rng), pos(rng), pos(rng)};
    state.yaw_deg = yaw(rng);
    const VirtualStickCommand cmd = random_cmd(rng);
    const double step = dt(rng);

    const DroneState ours = apply_command(state, cmd, step);
    const DroneState ref = reference_step(state, cmd, step);
    CHECK(std::abs(ours.position.x - ref.position.x) < 1e-9);
    CHECK(std::abs(ours.position.y - ref.position.y) < 1e-9);
    CHECK(std::abs(ours.position.z - ref.position.z) < 1e-9);
    CHECK(std::abs(ours.yaw_deg - ref.yaw_deg) < 1e-9);
  }
}

TEST_CASE("displacement norm is yaw invariant for yaw_rate zero") {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> yaw(0, 360);
  for (int i = 0; i < 200; ++i) {
    VirtualStickCommand cmd = random_cmd(rng);
    cmd.yaw_rate = 0;
    const double dt = 0.25;

    DroneState at_zero;
    const DroneState moved_zero = apply_command(at_zero, cmd, dt);
    const double norm_zero = std::hypot(moved_zero.position.x, moved_zero.position.y);

    DroneState at_yaw;
    at_yaw.yaw_deg = yaw(rng);
    const DroneState moved_yaw = apply_command(at_yaw, cmd, dt);
    const double norm_yaw = std::hypot(moved_yaw.position.x, moved_yaw.position.y);

    CHECK(norm_zero == doctest::Approx(norm_yaw).epsilon(1e-12));
  }
}

TEST_CASE("watchdog_check trips after the 200 ms threshold") {
  DroneState state;
  state.last_cmd_ts_us = 1'000'000;
  state.velocity = {1, 2, 3};

  CHECK(watchdog_check(state, 1'100'000).mode == FlightMode::kNormal);
  CHECK(watchdog_check(state, 1'200'000).mode == FlightMode::kNormal);  // exactly 5 Hz
  const DroneState tripped = watchdog_check(state, 1'200'001);
  CHECK(tripped.mode == FlightMode::kFailsafeHover);
  CHECK(tripped.velocity == Vec3{});
}

TEST_CASE("steady 10 Hz stream keeps the drone in NORMAL") {
  DroneCore drone(0);
  for (uint64_t t = 0; t <= 60'000'000; t += 100'000) {
    drone.submit_virtual_stick({0, 0.1f, 0, 0}, t);
    CHECK(drone.state().mode == FlightMode::kNormal);
  }
  drone.advance_to(60'050'000);
  CHECK(drone.state().mode == FlightMode::kNormal);
}

TEST_CASE("a 500 ms command gap trips the failsafe at the deadline") {
  DroneCore drone(0);
  drone.submit_virtual_stick({0, 1.0f, 0, 0}, 100'000);
  drone.advance_to(200'000);
  CHECK(drone.state().mode == FlightMode::kNormal);

  // Walk across the gap; the trip point is last command + 200 ms.
  drone.advance_to(299'999);
  CHECK(drone.state().mode == FlightMode::kNormal);
  drone.advance_to(300'001);
  CHECK(drone.state().mode == FlightMode::kFailsafeHover);
  CHECK(drone.state().velocity == Vec3{});

  // Hover holds position: the drone moved at 10 m/s only until the trip.
  const double traveled = drone.state().position.x;
  CHECK(traveled == doctest::Approx(0.2 * 10.0).epsilon(1e-9));
  drone.advance_to(600'000);
  CHECK(drone.state().position.x == doctest::Approx(traveled));
}

TEST_CASE("recovery requires three consecutive good intervals") {
  DroneCore drone(0);
  drone.submit_virtual_stick({}, 0);
  drone.advance_to(1'000'000);  // long gap, failsafe trips
  CHECK(drone.state().mode == FlightMode::kFailsafeHover);

  // First arrival after the gap has a bad interval; three good ones follow.
  drone.submit_virtual_stick({}, 1'000'000);
  CHECK(drone.state().mode == FlightMode::kFailsafeHover);
  drone.submit_virtual_stick({}, 1'100'000);
  CHECK(drone.state().mode == FlightMode::kFailsafeHover);
  drone.submit_virtual_stick({}, 1'200'000);
  CHECK(drone.state().mode == FlightMode::kFailsafeHover);
  drone.submit_virtual_stick({}, 1'300'000);
  CHECK(drone.state().mode == FlightMode::kNormal);
}

TEST_CASE("a 100 Hz burst is coalesced to at most 25 applied commands per second") {
  DroneCore drone(0);
  // Warm up within the allowed band so the burst starts in NORMAL.
  drone.submit_virtual_stick({}, 0);
  const uint64_t t0 = 100'000;
  const uint64_t before = drone.applied_commands();
  for (int i = 0; i < 100; ++i) {
    VirtualStickCommand cmd;
    cmd.pitch = static_cast<float>(i) / 100.0f;
    drone.submit_virtual_stick(cmd, t0 + static_cast<uint64_t>(i) * 10'000);
  }
  // Applied count inside the one-second burst window.
  drone.advance_to(t0 + 999'999);
  const uint64_t applied = drone.applied_commands() - before;
  CHECK(applied <= 25);
  CHECK(applied >= 20);
  CHECK(drone.state().mode == FlightMode::kNormal);
}

TEST_CASE("out-of-range commands are rejected without touching state") {
  DroneCore drone(0);
  drone.submit_virtual_stick({0, 0.5f, 0, 0}, 10'000);
  const DroneState before = drone.state();
  drone.submit_virtual_stick({5.0f, 0, 0, 0}, 20'000);
  CHECK(drone.rejected_commands() == 1);
  // Rejected arrivals do not count as commands: last_cmd_ts is unchanged.
  CHECK(drone.state().last_cmd_ts_us == before.last_cmd_ts_us);
}

TEST_CASE("gimbal slews linearly and saturates at the target") {
  DroneState state;
  const DroneState mid = apply_gimbal(state, {-30.0f, 30.0f}, 0.5);
  CHECK(mid.gimbal_pitch_deg == doctest::Approx(-15.0));

  DroneState at_target;
  at_target.gimbal_pitch_deg = -30.0;
  CHECK(apply_gimbal(at_target, {-30.0f, 30.0f}, 0.25).gimbal_pitch_deg ==
        doctest::Approx(-30.0));
}

TEST_CASE("gimbal reaches -90 in the closed-form slew time without overshoot") {
  DroneState state;  // starts at 0 deg, 60 deg/s toward -90
  const GimbalCommand cmd{-90.0f, 60.0f};
  int steps = 0;
  while (state.gimbal_pitch_deg > -90.0 && steps < 100) {
    state = apply_gimbal(state, cmd, 0.1);
    ++steps;
    CHECK(state.gimbal_pitch_deg >= -90.0);
  }
  CHECK(steps == 15);  // 90 deg / 60 deg/s = 1.5 s = 15 steps
  CHECK(state.gimbal_pitch_deg == doctest::Approx(-90.0));
}

TEST_CASE("gimbal commands outside the envelope are rejected") {
  DroneState state;
  CHECK_THROWS_AS(apply_gimbal(state, {-91.0f, 10.0f}, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(apply_gimbal(state, {31.0f, 10.0f}, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(apply_gimbal(state, {0.0f, 0.0f}, 0.1), std::invalid_argument);

  DroneCore drone(0);
  drone.submit_gimbal({-200.0f, 5.0f}, 1000);
  CHECK(drone.rejected_commands() == 1);
}

TEST_CASE("gimbal never exits its mechanical range under random commands") {
  std::mt19937_64 rng(23);
  DroneCore drone(0);
  uint64_t t = 0;
  for (int i = 0; i < 300; ++i) {
    t += rng() % 200'000;
    GimbalCommand cmd;
    cmd.pitch_deg = -90.0f + static_cast<float>(rng() % 1200) / 10.0f;
    cmd.speed_deg_s = 1.0f + static_cast<float>(rng() % 900) / 10.0f;
    drone.submit_gimbal(cmd, t);
    t += rng() % 500'000;
    drone.advance_to(t);
    CHECK(drone.state().gimbal_pitch_deg >= kGimbalMinDeg);
    CHECK(drone.state().gimbal_pitch_deg <= kGimbalMaxDeg);
  }
}

TEST_CASE("yaw stays normalized to [0, 360)") {
  std::mt19937_64 rng(24);
  DroneState state;
  for (int i = 0; i < 500; ++i) {
    VirtualStickCommand cmd = random_cmd(rng);
    state.mode = FlightMode::kNormal;
    state = apply_command(state, cmd, 0.5);
    CHECK(state.yaw_deg >= 0.0);
    CHECK(state.yaw_deg < 360.0);
  }
}

#include <doctest.h>

#include "skybridge/harness.hpp"
#include "skybridge/jpeg.hpp"
#include "skybridge/sim.hpp"
#include "skybridge/timeline.hpp"

using namespace skybridge;

TEST_CASE("camera clock emits 60 +/- 1 frames over two seconds at 30 fps") {
  SimConfig config;
  config.camera_fps = 30;
  CameraSim sim(config, 0);
  uint32_t frames = 0;
  for (uint32_t k = 0; sim.frame_due_us(k) < 2'000'000; ++k) {
    sim.frame_tick(sim.frame_due_us(k));
    ++frames;
  }
  CHECK(frames >= 59);
  CHECK(frames <= 61);
  CHECK(sim.frames_emitted() == frames);
}

TEST_CASE("frame clock does not drift over long runs") {
  SimConfig config;
  config.camera_fps = 30;
  CameraSim sim(config, 0);
  // After an hour of simulated frames the schedule stays on the grid.
  const uint64_t due = sim.frame_due_us(30 * 3600);
  CHECK(due == doctest::Approx(3'600'000'000.0).epsilon(1e-9));
}

TEST_CASE("with no commands the drone ends up holding position in failsafe") {
  SimConfig config;
  CameraSim sim(config, 0);
  sim.frame_tick(0);
  const Vec3 start_position = sim.drone().state().position;

  TelemetrySample sample = sim.telemetry_tick(1'000'000);
  CHECK(sample.mode == FlightMode::kFailsafeHover);
  CHECK(sample.position == start_position);

  sample = sim.telemetry_tick(30'000'000);
  CHECK(sample.mode == FlightMode::kFailsafeHover);
  CHECK(sample.position == start_position);
}

TEST_CASE("target color changes what the camera renders") {
  SimConfig config;
  CameraSim sim(config, 0);

  sim.set_target(TargetColor::kBlack, 10'000);
  const Yuv420Frame black = sim.frame_tick(33'333);
  sim.set_target(TargetColor::kWhite, 40'000);
  const Yuv420Frame white = sim.frame_tick(66'667);

  const auto classify = [](const Yuv420Frame& f) {
    return classify_frame(nv21_to_gray(yuv420_to_nv21_gray(f)), 0.5);
  };
  CHECK(classify(black) == Classification::kBlack);
  CHECK(classify(white) == Classification::kWhite);
  CHECK(black.seq + 1 == white.seq);
}

TEST_CASE("virtual stick commands steer the simulated drone") {
  SimConfig config;
  CameraSim sim(config, 0);
  // 20 Hz of forward stick for one second.
  for (uint64_t t = 0; t <= 1'000'000; t += 50'000) {
    sim.submit_stick({0, 1.0f, 0, 0}, t);
  }
  const TelemetrySample sample = sim.telemetry_tick(1'000'000);
  CHECK(sample.mode == FlightMode::kNormal);
  CHECK(sample.position.x == doctest::Approx(10.0).epsilon(0.01));
  CHECK(sample.position.y == doctest::Approx(0.0));
}

TEST_CASE("gimbal commands reach the simulated mount") {
  SimConfig config;
  CameraSim sim(config, 0);
  sim.submit_gimbal({-45.0f, 90.0f}, 0);
  const TelemetrySample sample = sim.telemetry_tick(500'000);
  CHECK(sample.gimbal_pitch_deg == doctest::Approx(-45.0));
}

TEST_CASE("optional command-direction delay defers application") {
  SimTimeline timeline;
  SimConfig config;
  config.link = {100.0, 0.0, true};
  CameraSim sim(config, 0);
  LinkScheduler command_link(config.link, 9);

  // 20 Hz of full forward stick routed through the delayed command link,
  // the same wiring the simulated-time demo uses when delay_commands is on.
  for (uint64_t k = 0; k <= 20; ++k) {
    timeline.at(k * 50'000, [&] {
      const VirtualStickCommand cmd{0, 1.0f, 0, 0};
      timeline.at(command_link.delivery_for(timeline.now_us()),
                  [&, cmd] { sim.submit_stick(cmd, timeline.now_us()); });
    });
  }
  timeline.run_until(1'100'000);

  const TelemetrySample sample = sim.telemetry_tick(1'100'000);
  CHECK(sample.mode == FlightMode::kNormal);
  // First command lands at 100 ms, so motion covers one second, not 1.1 s.
  CHECK(sample.position.x == doctest::Approx(10.0).epsilon(0.01));
}

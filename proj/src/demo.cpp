// SPDX-License-Identifier: Apache-2.0
#include "skybridge/demo.hpp"

#include <fstream>
#include <functional>
#include <future>
#include <ostream>
#include <thread>

#include "skybridge/bridge.hpp"
#include "skybridge/broker.hpp"
#include "skybridge/log.hpp"
#include "skybridge/payloads.hpp"
#include "skybridge/sim.hpp"
#include "skybridge/timeline.hpp"

namespace skybridge {

namespace {

SimConfig sim_config_from(const DemoConfig& config) {
  SimConfig sim;
  sim.camera_fps = config.camera_fps;
  sim.width = config.width;
  sim.height = config.height;
  sim.link = config.link;
  sim.seed = config.seed;
  sim.telemetry_hz = config.telemetry_hz;
  return sim;
}

BridgeConfig bridge_config_from(const DemoConfig& config) {
  BridgeConfig bridge;
  bridge.skip_frame = config.skip_frame;
  bridge.jpeg_quality = config.jpeg_quality;
  bridge.command_rate_hz = config.command_rate_hz;
  return bridge;
}

}  // namespace

DemoResult run_demo_simtime(const DemoConfig& config) {
  DemoResult result;
  const SimConfig sim_config = sim_config_from(config);
  const BridgeConfig bridge_config = bridge_config_from(config);
  if (!sim_config.valid() || !bridge_config.valid() || config.n_toggles < 1) {
    log_error("demo", "invalid configuration");
    result.exit_code = 1;
    return result;
  }

  SimTimeline timeline;
  TimelineClock clock(timeline);
  LocalBus bus(clock);

  CameraSim sim(sim_config, 0);
  LinkScheduler frame_link(config.link, config.seed);
  LinkScheduler command_link(config.link, config.seed + 1);
  HarnessRecorder recorder;
  bool aborted = false;

  BridgeCore bridge(
      bridge_config,
      [&](const ImagePayload& payload) {
        bus.publish(bridge_config.image_topic, MsgType::kImage,
                    encode_image_payload(payload));
      },
      [&](const VirtualStickCommand& cmd) {
        if (config.link.delay_commands) {
          timeline.at(command_link.delivery_for(timeline.now_us()),
                      [&, cmd] { sim.submit_stick(cmd, timeline.now_us()); });
        } else {
          sim.submit_stick(cmd, timeline.now_us());
        }
      },
      [&](const GimbalCommand& cmd) { sim.submit_gimbal(cmd, timeline.now_us()); });

  bus.subscribe(kTopicTarget, [&](const Envelope& env) {
    if (auto color = decode_target(env.payload)) {
      sim.set_target(*color, timeline.now_us());
    }
  });
  bus.subscribe(bridge_config.image_topic, [&](const Envelope& env) {
    recorder.on_image_envelope(env, timeline.now_us());
  });
  bus.subscribe(kTopicVirtualStick, [&](const Envelope& env) {
    bridge.on_stick_payload(env.payload, timeline.now_us());
  });
  bus.subscribe(kTopicGimbal, [&](const Envelope& env) {
    bridge.on_gimbal_payload(env.payload);
  });

  // Camera pump: render at the frame clock, deliver through the link model.
  std::function<void(uint32_t)> schedule_frame = [&](uint32_t index) {
    timeline.at(sim.frame_due_us(index), [&, index] {
      Yuv420Frame frame = sim.frame_tick(timeline.now_us());
      timeline.at(frame_link.delivery_for(timeline.now_us()),
                  [&, frame = std::move(frame)] { bridge.on_frame(frame); });
      schedule_frame(index + 1);
    });
  };
  schedule_frame(0);

  std::function<void(uint32_t)> schedule_telemetry = [&](uint32_t tick) {
    timeline.at(sim.telemetry_due_us(tick), [&, tick] {
      bus.publish(kTopicTelemetry, MsgType::kTelemetry,
                  encode_telemetry(sim.telemetry_tick(timeline.now_us())));
      schedule_telemetry(tick + 1);
    });
  };
  schedule_telemetry(0);

  std::function<void(uint64_t)> schedule_command_tick = [&](uint64_t tick) {
    timeline.at(tick * bridge.command_period_us(), [&, tick] {
      bridge.command_tick(timeline.now_us());
      schedule_command_tick(tick + 1);
    });
  };
  schedule_command_tick(0);

  for (size_t i = 0; i < config.n_toggles; ++i) {
    const TargetColor color = i % 2 == 0 ? TargetColor::kBlack : TargetColor::kWhite;
    timeline.at(i * config.period_us, [&, color] {
      const uint64_t display_ts = timeline.now_us();
      bus.publish(kTopicTarget, MsgType::kTargetSet, encode_target(color));
      recorder.record_toggle(display_ts, color);
    });
  }

  timeline.at(10'000'000, [&] {
    if (recorder.observation_count() == 0) {
      log_error("demo", "no frames observed within 10 s of simulated time");
      aborted = true;
      timeline.request_stop();
    }
  });

  // One drain period after the last toggle, matching the live harness.
  timeline.run_until(config.n_toggles * config.period_us);
  if (aborted) return result;

  result.log = recorder.snapshot();
  const ExperimentReport report = analyze(result.log);
  std::ofstream csv(config.out_csv);
  if (!csv) {
    log_error("demo", "cannot write %s", config.out_csv.c_str());
    return result;
  }
  write_report_csv(csv, result.log, report);
  result.report = report;
  result.exit_code = 0;
  return result;
}

DemoResult run_demo_live(const DemoConfig& config, std::stop_token stop) {
  DemoResult result;

  Broker broker;
  if (!broker.start({.host = "127.0.0.1", .port = config.bus_port})) {
    log_error("demo", "cannot start broker");
    return result;
  }
  const Endpoint bus_endpoint{"127.0.0.1", broker.port()};

  SimConfig sim_config = sim_config_from(config);
  sim_config.bus = bus_endpoint;
  sim_config.link_port = 0;  // ephemeral

  std::promise<uint16_t> link_port_promise;
  auto link_port_future = link_port_promise.get_future();
  std::jthread sim_thread([&](std::stop_token sim_stop) {
    run_sim_live(sim_config, sim_stop, &link_port_promise);
  });
  const uint16_t link_port = link_port_future.get();
  if (link_port == 0) {
    log_error("demo", "simulator failed to start");
    broker.stop();
    return result;
  }

  BridgeConfig bridge_config = bridge_config_from(config);
  bridge_config.bus = bus_endpoint;
  bridge_config.link = Endpoint{"127.0.0.1", link_port};
  std::jthread bridge_thread([&](std::stop_token bridge_stop) {
    run_bridge_live(bridge_config, bridge_stop);
  });

  HarnessConfig harness_config;
  harness_config.bus = bus_endpoint;
  harness_config.period_us = config.period_us;
  harness_config.n_toggles = config.n_toggles;
  harness_config.out_csv = config.out_csv;
  HarnessOutcome outcome = run_harness_live(harness_config, stop);

  bridge_thread.request_stop();
  sim_thread.request_stop();
  bridge_thread.join();
  sim_thread.join();
  broker.stop();

  result.exit_code = outcome.exit_code;
  result.report = outcome.report;
  result.log = std::move(outcome.log);
  return result;
}

void print_report(std::ostream& out, const ExperimentLog& log,
                  const ExperimentReport& report) {
  out << "toggle  color  delta_ms\n";
  size_t sample_idx = 0;
  for (size_t i = 0; i < log.toggles.size(); ++i) {
    char line[128];
    if (sample_idx < report.delay.samples.size() &&
        report.delay.samples[sample_idx].toggle_idx == i) {
      std::snprintf(line, sizeof line, "%6zu  %-5s  %10.3f\n", i,
                    to_string(log.toggles[i].color),
                    report.delay.samples[sample_idx].delta_ms);
      ++sample_idx;
    } else {
      std::snprintf(line, sizeof line, "%6zu  %-5s  %10s\n", i,
                    to_string(log.toggles[i].color), "(missed)");
    }
    out << line;
  }
  out << format_summary(report.stats, report.delay.missed_toggles.size()) << "\n";
}

}  // namespace skybridge

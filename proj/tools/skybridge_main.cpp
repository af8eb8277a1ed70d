// SPDX-License-Identifier: Apache-2.0
//
// skybridge: single entry point for the bridge testbed roles.
//   bus      message broker
//   sim      simulated drone + camera + link
//   bridge   bus <-> drone-link relay (skip filter, grayscale JPEG)
//   harness  alternating-target latency/FPS experiment
//   demo     all of the above in one process

#include <atomic>
#include <chrono>
#include <csignal>
#include <iostream>
#include <stop_token>
#include <thread>

#include <CLI11.hpp>

#include "skybridge/bridge.hpp"
#include "skybridge/broker.hpp"
#include "skybridge/demo.hpp"
#include "skybridge/harness.hpp"
#include "skybridge/log.hpp"
#include "skybridge/sim.hpp"

namespace {

std::atomic<bool> g_interrupted{false};

void on_signal(int) { g_interrupted.store(true); }

// Bridges the async signal flag into a stop_token the roles can poll.
class InterruptWatcher {
 public:
  InterruptWatcher() {
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    watcher_ = std::jthread([this](std::stop_token st) {
      while (!st.stop_requested()) {
        if (g_interrupted.load()) {
          source_.request_stop();
          return;
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(50));
      }
    });
  }

  std::stop_token token() { return source_.get_token(); }

 private:
  std::stop_source source_;
  std::jthread watcher_;
};

std::optional<skybridge::Endpoint> parse_endpoint_or_fail(const std::string& text,
                                                          uint16_t default_port,
                                                          const char* flag) {
  auto ep = skybridge::Endpoint::parse(text, default_port);
  if (!ep) std::cerr << "skybridge: invalid address for " << flag << ": " << text << "\n";
  return ep;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace skybridge;

  CLI::App app{"skybridge - UAV video streaming and control bridge testbed"};
  app.require_subcommand(1);
  std::string log_level = "info";
  app.add_option("--log-level", log_level, "error|warn|info|debug")
      ->check(CLI::IsMember({"error", "warn", "info", "debug"}))
      ->capture_default_str();

  // --- bus ---
  auto* bus_cmd = app.add_subcommand("bus", "Run the message broker");
  std::string listen_addr = "127.0.0.1:7447";
  bus_cmd->add_option("--listen", listen_addr, "listen address (host:port)")
      ->capture_default_str();

  // --- shared knobs ---
  std::string bus_addr = "127.0.0.1:7447";
  double fps = 30.0;
  int width = 640;
  int height = 360;
  double link_delay_ms = 320.0;
  double link_jitter_ms = 30.0;
  bool link_delay_commands = false;
  uint64_t seed = 42;
  bool sim_time = false;
  std::string link_addr = "127.0.0.1:7448";
  uint32_t skip_frame = 2;
  int jpeg_quality = 90;
  double command_rate_hz = 20.0;
  std::string image_topic = kTopicImage;
  double period_s = 2.0;
  size_t toggles = 30;
  std::string out_csv = "report.csv";
  uint16_t demo_bus_port = 0;

  // --- sim ---
  auto* sim_cmd = app.add_subcommand("sim", "Run the simulated drone");
  sim_cmd->add_option("--bus", bus_addr, "broker address")->capture_default_str();
  sim_cmd->add_option("--fps", fps, "camera frame rate")
      ->check(CLI::Range(1.0, 240.0))->capture_default_str();
  sim_cmd->add_option("--width", width, "frame width (even)")->capture_default_str();
  sim_cmd->add_option("--height", height, "frame height (even)")->capture_default_str();
  sim_cmd->add_option("--link-delay-ms", link_delay_ms, "one-way frame delay")
      ->check(CLI::NonNegativeNumber)->capture_default_str();
  sim_cmd->add_option("--link-jitter-ms", link_jitter_ms, "uniform jitter half-width")
      ->check(CLI::NonNegativeNumber)->capture_default_str();
  sim_cmd->add_flag("--link-delay-commands", link_delay_commands,
                    "apply the link model to commands too");
  sim_cmd->add_option("--seed", seed, "jitter RNG seed")->capture_default_str();
  sim_cmd->add_option("--link-listen", link_addr, "drone link listen address")
      ->capture_default_str();
  sim_cmd->add_flag("--sim-time", sim_time,
                    "simulated-time mode (only meaningful under 'demo')");

  // --- bridge ---
  auto* bridge_cmd = app.add_subcommand("bridge", "Run the bus <-> drone relay");
  bridge_cmd->add_option("--bus", bus_addr, "broker address")->capture_default_str();
  bridge_cmd->add_option("--link", link_addr, "drone link address")->capture_default_str();
  bridge_cmd->add_option("--skip-frame", skip_frame, "publish every Nth frame")
      ->check(CLI::PositiveNumber)->capture_default_str();
  bridge_cmd->add_option("--jpeg-quality", jpeg_quality, "JPEG quality flag")
      ->check(CLI::Range(1, 100))->capture_default_str();
  bridge_cmd->add_option("--command-rate-hz", command_rate_hz, "stick forwarding rate")
      ->check(CLI::Range(5.0, 25.0))->capture_default_str();
  bridge_cmd->add_option("--image-topic", image_topic, "published image topic")
      ->capture_default_str();

  // --- harness ---
  auto* harness_cmd = app.add_subcommand("harness", "Run the latency/FPS experiment");
  harness_cmd->add_option("--bus", bus_addr, "broker address")->capture_default_str();
  harness_cmd->add_option("--period-s", period_s, "toggle period in seconds")
      ->check(CLI::PositiveNumber)->capture_default_str();
  harness_cmd->add_option("--toggles", toggles, "number of target toggles")
      ->check(CLI::PositiveNumber)->capture_default_str();
  harness_cmd->add_option("--out", out_csv, "CSV report path")->capture_default_str();
  harness_cmd->add_option("--image-topic", image_topic, "subscribed image topic")
      ->capture_default_str();

  // --- demo ---
  auto* demo_cmd = app.add_subcommand(
      "demo", "Run bus + sim + bridge + harness with the published defaults");
  demo_cmd->add_option("--toggles", toggles, "number of target toggles")
      ->check(CLI::PositiveNumber)->capture_default_str();
  demo_cmd->add_option("--seed", seed, "deterministic RNG seed")->capture_default_str();
  demo_cmd->add_flag("--sim-time", sim_time, "deterministic simulated-time run");
  demo_cmd->add_option("--period-s", period_s, "toggle period in seconds")
      ->check(CLI::PositiveNumber)->capture_default_str();
  demo_cmd->add_option("--fps", fps, "camera frame rate")
      ->check(CLI::Range(1.0, 240.0))->capture_default_str();
  demo_cmd->add_option("--width", width, "frame width (even)")->capture_default_str();
  demo_cmd->add_option("--height", height, "frame height (even)")->capture_default_str();
  demo_cmd->add_option("--link-delay-ms", link_delay_ms, "one-way frame delay")
      ->check(CLI::NonNegativeNumber)->capture_default_str();
  demo_cmd->add_option("--link-jitter-ms", link_jitter_ms, "uniform jitter half-width")
      ->check(CLI::NonNegativeNumber)->capture_default_str();
  demo_cmd->add_flag("--link-delay-commands", link_delay_commands,
                     "apply the link model to commands too");
  demo_cmd->add_option("--skip-frame", skip_frame, "publish every Nth frame")
      ->check(CLI::PositiveNumber)->capture_default_str();
  demo_cmd->add_option("--jpeg-quality", jpeg_quality, "JPEG quality flag")
      ->check(CLI::Range(1, 100))->capture_default_str();
  demo_cmd->add_option("--command-rate-hz", command_rate_hz, "stick forwarding rate")
      ->check(CLI::Range(5.0, 25.0))->capture_default_str();
  demo_cmd->add_option("--out", out_csv, "CSV report path")->capture_default_str();
  demo_cmd->add_option("--bus-port", demo_bus_port,
                       "broker port for the live demo (0 = ephemeral)")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  init_log_level_from_env(*parse_log_level(log_level));
  InterruptWatcher interrupt;

  if (app.got_subcommand(bus_cmd)) {
    auto ep = parse_endpoint_or_fail(listen_addr, 7447, "--listen");
    if (!ep) return 1;
    Broker broker;
    if (!broker.start({.host = ep->host, .port = ep->port})) return 2;
    auto token = interrupt.token();
    while (!token.stop_requested()) {
      std::this_thread::sleep_for(std::chrono::milliseconds(100));
    }
    broker.stop();
    return 0;
  }

  if (app.got_subcommand(sim_cmd)) {
    if (sim_time) {
      std::cerr << "skybridge sim: --sim-time requires a single shared timeline; "
                   "use 'skybridge demo --sim-time'\n";
      return 1;
    }
    auto bus_ep = parse_endpoint_or_fail(bus_addr, 7447, "--bus");
    auto link_ep = parse_endpoint_or_fail(link_addr, 7448, "--link-listen");
    if (!bus_ep || !link_ep) return 1;
    SimConfig config;
    config.bus = *bus_ep;
    config.camera_fps = fps;
    config.width = width;
    config.height = height;
    config.link = {link_delay_ms, link_jitter_ms, link_delay_commands};
    config.seed = seed;
    config.link_host = link_ep->host;
    config.link_port = link_ep->port;
    if (!config.valid()) {
      std::cerr << "skybridge sim: invalid configuration (check --width/--height/--fps)\n";
      return 1;
    }
    return run_sim_live(config, interrupt.token());
  }

  if (app.got_subcommand(bridge_cmd)) {
    auto bus_ep = parse_endpoint_or_fail(bus_addr, 7447, "--bus");
    auto link_ep = parse_endpoint_or_fail(link_addr, 7448, "--link");
    if (!bus_ep || !link_ep) return 1;
    BridgeConfig config;
    config.bus = *bus_ep;
    config.link = *link_ep;
    config.skip_frame = skip_frame;
    config.jpeg_quality = jpeg_quality;
    config.command_rate_hz = command_rate_hz;
    config.image_topic = image_topic;
    if (!config.valid()) {
      std::cerr << "skybridge bridge: invalid configuration\n";
      return 1;
    }
    return run_bridge_live(config, interrupt.token());
  }

  if (app.got_subcommand(harness_cmd)) {
    auto bus_ep = parse_endpoint_or_fail(bus_addr, 7447, "--bus");
    if (!bus_ep) return 1;
    HarnessConfig config;
    config.bus = *bus_ep;
    config.period_us = static_cast<uint64_t>(period_s * 1e6);
    config.n_toggles = toggles;
    config.out_csv = out_csv;
    config.image_topic = image_topic;
    if (!config.valid()) {
      std::cerr << "skybridge harness: invalid configuration\n";
      return 1;
    }
    HarnessOutcome outcome = run_harness_live(config, interrupt.token());
    if (outcome.report) {
      print_report(std::cout, outcome.log, *outcome.report);
      std::cout << "CSV: " << config.out_csv << "\n";
    }
    return outcome.exit_code;
  }

  if (app.got_subcommand(demo_cmd)) {
    DemoConfig config;
    config.seed = seed;
    config.sim_time = sim_time;
    config.camera_fps = fps;
    config.width = width;
    config.height = height;
    config.link = {link_delay_ms, link_jitter_ms, link_delay_commands};
    config.skip_frame = skip_frame;
    config.jpeg_quality = jpeg_quality;
    config.command_rate_hz = command_rate_hz;
    config.period_us = static_cast<uint64_t>(period_s * 1e6);
    config.n_toggles = toggles;
    config.out_csv = out_csv;
    config.bus_port = demo_bus_port;

    DemoResult result = config.sim_time ? run_demo_simtime(config)
                                        : run_demo_live(config, interrupt.token());
    if (result.report) {
      print_report(std::cout, result.log, *result.report);
      std::cout << "CSV: " << config.out_csv << "\n";
    }
    return result.exit_code;
  }

  return 1;
}

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <stop_token>
#include <string>

#include "skybridge/harness.hpp"
#include "skybridge/link.hpp"

namespace skybridge {

// Whole-experiment configuration mirroring the published setup: quality 90,
// skip 2, toggle period 2 s.
struct DemoConfig {
  uint64_t seed = 42;
  bool sim_time = false;

  double camera_fps = 30.0;
  int width = 640;
  int height = 360;
  LinkModel link{320.0, 30.0, false};
  double telemetry_hz = 10.0;

  uint32_t skip_frame = 2;
  int jpeg_quality = 90;
  double command_rate_hz = 20.0;

  uint64_t period_us = 2'000'000;
  size_t n_toggles = 30;
  std::string out_csv = "report.csv";
  uint16_t bus_port = 0;  // live mode only; 0 picks an ephemeral port
};

struct DemoResult {
  int exit_code = 2;
  std::optional<ExperimentReport> report;
  ExperimentLog log;
};

// One process, one timeline: bus, simulator, bridge and harness all driven
// by the event scheduler. Identical seed and flags give a byte-identical
// CSV.
DemoResult run_demo_simtime(const DemoConfig& config);

// One process tree on the wall clock: an in-process broker plus the live
// sim/bridge roles on their own threads, harness on the calling thread,
// all talking loopback TCP.
DemoResult run_demo_live(const DemoConfig& config, std::stop_token stop);

// Per-toggle table plus the Table-2-style summary block.
void print_report(std::ostream& out, const ExperimentLog& log,
                  const ExperimentReport& report);

}  // namespace skybridge

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <mutex>
#include <optional>
#include <span>
#include <stop_token>
#include <string>
#include <vector>

#include "skybridge/bus.hpp"
#include "skybridge/frame.hpp"
#include "skybridge/net.hpp"
#include "skybridge/scene.hpp"

namespace skybridge {

// Classification thresholds sit far from the rendered 16/235 extremes and
// survive the JPEG round-trip error.
inline constexpr double kBlackMeanThreshold = 64.0;
inline constexpr double kWhiteMeanThreshold = 192.0;

enum class Classification : uint8_t { kBlack, kWhite, kIndeterminate };

const char* to_string(Classification c);

// Mean luminance over the central region (fraction per axis): >= 192 is
// WHITE, <= 64 is BLACK, anything between is INDETERMINATE.
Classification classify_frame(const GrayFrame& frame, double central_fraction = 0.5);

struct ToggleEvent {
  uint64_t display_ts_us = 0;
  TargetColor color = TargetColor::kBlack;
};

struct FrameObservation {
  uint64_t recv_ts_us = 0;
  uint64_t capture_ts_us = 0;
  uint32_t seq = 0;
  Classification classification = Classification::kIndeterminate;
};

struct StreamStats {
  double fps_avg = 0;
  double fps_std = 0;
  double delay_avg_ms = 0;
  double delay_std_ms = 0;
  size_t n_frames = 0;
  size_t n_toggles = 0;
  size_t n_indeterminate = 0;
};

struct MeanStd {
  double avg = 0;
  double std = 0;  // sample standard deviation (divisor n-1, 0 when n <= 1)
  size_t n = 0;
};

MeanStd mean_std(std::span<const double> samples);

// Per-toggle glass-to-glass delay: the first observation after display_ts
// classified as the toggle's color, searched before the next toggle.
struct DelaySample {
  size_t toggle_idx = 0;
  uint64_t match_ts_us = 0;
  double delta_ms = 0;
};

struct DelayResult {
  std::vector<DelaySample> samples;
  std::vector<size_t> missed_toggles;
};

DelayResult measure_delay(std::span<const ToggleEvent> toggles,
                          std::span<const FrameObservation> observations);

// Instantaneous FPS from consecutive arrival gaps; every received frame
// counts regardless of classification. The first observation (and any
// zero-gap duplicate timestamp) yields no sample.
struct FpsSample {
  uint32_t seq = 0;
  uint64_t recv_ts_us = 0;
  double delta_f_ms = 0;
  double fps = 0;
};

std::vector<FpsSample> measure_fps(std::span<const FrameObservation> observations);

// Arithmetic mean and sample std over both sample sets; counts are filled
// in by the caller.
StreamStats compute_stats(std::span<const double> delay_ms_samples,
                          std::span<const double> fps_samples);

struct ExperimentLog {
  std::vector<ToggleEvent> toggles;
  std::vector<FrameObservation> observations;
};

struct ExperimentReport {
  StreamStats stats;
  DelayResult delay;
  std::vector<FpsSample> fps;
};

ExperimentReport analyze(const ExperimentLog& log);

void write_report_csv(std::ostream& out, const ExperimentLog& log,
                      const ExperimentReport& report);

// Recomputes StreamStats from a persisted CSV; the measurement functions
// are pure over the recorded log, so this must agree exactly with the
// original run.
std::optional<StreamStats> reanalyze_csv(std::istream& in);

std::string format_summary(const StreamStats& stats, size_t missed);

// Shared recording state between the live runner and simulated-time demo.
// One writer appends observations (from bus deliveries); toggle recording
// happens on the toggle clock. Thread safe.
class HarnessRecorder {
 public:
  explicit HarnessRecorder(double classify_fraction = 0.5);

  void record_toggle(uint64_t display_ts_us, TargetColor color);
  // Decodes the IMAGE payload, decodes the JPEG, classifies, appends.
  void on_image_envelope(const Envelope& env, uint64_t recv_ts_us);

  size_t observation_count() const;
  ExperimentLog snapshot() const;
  uint64_t decode_failures() const { return decode_failures_; }

 private:
  mutable std::mutex mutex_;
  ExperimentLog log_;
  double classify_fraction_;
  uint64_t decode_failures_ = 0;
};

struct HarnessConfig {
  Endpoint bus{"127.0.0.1", 7447};
  uint64_t period_us = 2'000'000;
  size_t n_toggles = 30;
  std::string image_topic = kTopicImage;
  std::string out_csv = "report.csv";
  double classify_fraction = 0.5;
  uint64_t no_frame_timeout_us = 10'000'000;

  bool valid() const { return period_us > 0 && n_toggles >= 1; }
};

struct HarnessOutcome {
  int exit_code = 2;
  std::optional<ExperimentReport> report;
  ExperimentLog log;
};

// Runs the alternating-target experiment against a live bus: publishes
// TARGET_SET every period starting from BLACK, records observations from
// the image topic, and writes the CSV before computing stats. Aborts if no
// frame arrives within the configured timeout.
HarnessOutcome run_harness_live(const HarnessConfig& config, std::stop_token stop);

}  // namespace skybridge

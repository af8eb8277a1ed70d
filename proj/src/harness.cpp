// SPDX-License-Identifier: Apache-2.0
#include "skybridge/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <thread>

#include "skybridge/bus_client.hpp"
#include "skybridge/jpeg.hpp"
#include "skybridge/log.hpp"
#include "skybridge/payloads.hpp"

namespace skybridge {

const char* to_string(Classification c) {
  switch (c) {
    case Classification::kBlack: return "BLACK";
    case Classification::kWhite: return "WHITE";
    case Classification::kIndeterminate: return "INDETERMINATE";
  }
  return "?";
}

Classification classify_frame(const GrayFrame& frame, double central_fraction) {
  const Rect region = central_region(frame.width, frame.height, central_fraction);
  uint64_t sum = 0;
  uint64_t count = 0;
  for (int y = region.y0; y < region.y1; ++y) {
    const uint8_t* row = frame.pixels.data() + static_cast<size_t>(y) * frame.width;
    for (int x = region.x0; x < region.x1; ++x) {
      sum += row[x];
      ++count;
    }
  }
  if (count == 0) return Classification::kIndeterminate;
  const double mean = static_cast<double>(sum) / static_cast<double>(count);
  if (mean >= kWhiteMeanThreshold) return Classification::kWhite;
  if (mean <= kBlackMeanThreshold) return Classification::kBlack;
  return Classification::kIndeterminate;
}

MeanStd mean_std(std::span<const double> samples) {
  MeanStd result;
  result.n = samples.size();
  if (samples.empty()) return result;
  double sum = 0;
  for (double v : samples) sum += v;
  result.avg = sum / static_cast<double>(samples.size());
  if (samples.size() <= 1) return result;
  double sq = 0;
  for (double v : samples) {
    const double d = v - result.avg;
    sq += d * d;
  }
  result.std = std::sqrt(sq / static_cast<double>(samples.size() - 1));
  return result;
}

DelayResult measure_delay(std::span<const ToggleEvent> toggles,
                          std::span<const FrameObservation> observations) {
  DelayResult result;
  const auto color_of = [](TargetColor c) {
    return c == TargetColor::kBlack ? Classification::kBlack : Classification::kWhite;
  };
  for (size_t i = 0; i < toggles.size(); ++i) {
    const uint64_t window_start = toggles[i].display_ts_us;
    const uint64_t window_end =
        i + 1 < toggles.size() ? toggles[i + 1].display_ts_us : UINT64_MAX;
    const Classification wanted = color_of(toggles[i].color);

    auto it = std::upper_bound(
        observations.begin(), observations.end(), window_start,
        [](uint64_t ts, const FrameObservation& obs) { return ts < obs.recv_ts_us; });
    bool matched = false;
    for (; it != observations.end() && it->recv_ts_us < window_end; ++it) {
      if (it->classification == wanted) {
        DelaySample sample;
        sample.toggle_idx = i;
        sample.match_ts_us = it->recv_ts_us;
        sample.delta_ms =
            static_cast<double>(it->recv_ts_us - window_start) / 1000.0;
        result.samples.push_back(sample);
        matched = true;
        break;
      }
    }
    if (!matched) result.missed_toggles.push_back(i);
  }
  return result;
}

std::vector<FpsSample> measure_fps(std::span<const FrameObservation> observations) {
  std::vector<FpsSample> samples;
  for (size_t i = 1; i < observations.size(); ++i) {
    const uint64_t gap_us = observations[i].recv_ts_us - observations[i - 1].recv_ts_us;
    if (gap_us == 0) continue;
    FpsSample sample;
    sample.seq = observations[i].seq;
    sample.recv_ts_us = observations[i].recv_ts_us;
    sample.delta_f_ms = static_cast<double>(gap_us) / 1000.0;
    sample.fps = 1000.0 / sample.delta_f_ms;
    samples.push_back(sample);
  }
  return samples;
}

StreamStats compute_stats(std::span<const double> delay_ms_samples,
                          std::span<const double> fps_samples) {
  StreamStats stats;
  const MeanStd delay = mean_std(delay_ms_samples);
  const MeanStd fps = mean_std(fps_samples);
  stats.delay_avg_ms = delay.avg;
  stats.delay_std_ms = delay.std;
  stats.fps_avg = fps.avg;
  stats.fps_std = fps.std;
  return stats;
}

ExperimentReport analyze(const ExperimentLog& log) {
  ExperimentReport report;
  report.delay = measure_delay(log.toggles, log.observations);
  report.fps = measure_fps(log.observations);

  std::vector<double> delay_ms;
  delay_ms.reserve(report.delay.samples.size());
  for (const auto& s : report.delay.samples) delay_ms.push_back(s.delta_ms);
  std::vector<double> fps;
  fps.reserve(report.fps.size());
  for (const auto& s : report.fps) fps.push_back(s.fps);

  report.stats = compute_stats(delay_ms, fps);
  report.stats.n_frames = log.observations.size();
  report.stats.n_toggles = log.toggles.size();
  report.stats.n_indeterminate = static_cast<size_t>(
      std::count_if(log.observations.begin(), log.observations.end(),
                    [](const FrameObservation& o) {
                      return o.classification == Classification::kIndeterminate;
                    }));
  return report;
}

namespace {

std::string format_ms(double ms) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", ms);
  return buf;
}

std::string format_stat(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

void write_report_csv(std::ostream& out, const ExperimentLog& log,
                      const ExperimentReport& report) {
  out << "kind,toggle_idx,color,display_ts_us,match_ts_us,delta_ms\n";
  size_t sample_idx = 0;
  size_t missed_idx = 0;
  for (size_t i = 0; i < log.toggles.size(); ++i) {
    const ToggleEvent& toggle = log.toggles[i];
    if (sample_idx < report.delay.samples.size() &&
        report.delay.samples[sample_idx].toggle_idx == i) {
      const DelaySample& s = report.delay.samples[sample_idx++];
      out << "delay," << i << ',' << to_string(toggle.color) << ','
          << toggle.display_ts_us << ',' << s.match_ts_us << ','
          << format_ms(s.delta_ms) << '\n';
    } else {
      if (missed_idx < report.delay.missed_toggles.size() &&
          report.delay.missed_toggles[missed_idx] == i) {
        ++missed_idx;
      }
      out << "miss," << i << ',' << to_string(toggle.color) << ','
          << toggle.display_ts_us << ",,\n";
    }
  }

  out << "kind,frame_seq,recv_ts_us,delta_f_ms,fps\n";
  size_t fps_idx = 0;
  for (size_t i = 0; i < log.observations.size(); ++i) {
    const FrameObservation& obs = log.observations[i];
    out << "frame," << obs.seq << ',' << obs.recv_ts_us << ',';
    const bool has_gap = i > 0 && obs.recv_ts_us > log.observations[i - 1].recv_ts_us;
    if (has_gap && fps_idx < report.fps.size()) {
      const FpsSample& s = report.fps[fps_idx++];
      out << format_ms(s.delta_f_ms) << ',' << format_stat(s.fps) << '\n';
    } else {
      out << ",\n";
    }
  }

  out << "kind,metric,avg,std,n\n";
  out << "summary,fps," << format_stat(report.stats.fps_avg) << ','
      << format_stat(report.stats.fps_std) << ',' << report.fps.size() << '\n';
  out << "summary,delay_ms," << format_stat(report.stats.delay_avg_ms) << ','
      << format_stat(report.stats.delay_std_ms) << ',' << report.delay.samples.size()
      << '\n';
  out << "kind,counter,value\n";
  out << "count,frames," << report.stats.n_frames << '\n';
  out << "count,toggles," << report.stats.n_toggles << '\n';
  out << "count,indeterminate," << report.stats.n_indeterminate << '\n';
  out << "count,missed," << report.delay.missed_toggles.size() << '\n';
}

std::optional<StreamStats> reanalyze_csv(std::istream& in) {
  std::vector<double> delay_ms;
  std::vector<double> fps;
  StreamStats stats;
  bool saw_any = false;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    // std::getline drops a trailing empty field; normalize.
    if (!line.empty() && line.back() == ',') fields.push_back("");
    if (fields.empty()) continue;
    const std::string& kind = fields[0];
    if (kind == "delay" && fields.size() >= 6 && !fields[5].empty()) {
      delay_ms.push_back(std::strtod(fields[5].c_str(), nullptr));
      ++stats.n_toggles;
      saw_any = true;
    } else if (kind == "miss") {
      ++stats.n_toggles;
      saw_any = true;
    } else if (kind == "frame" && fields.size() >= 3) {
      ++stats.n_frames;
      saw_any = true;
      if (fields.size() >= 4 && !fields[3].empty()) {
        // fps recomputed from the exact-millisecond gap, same arithmetic as
        // measure_fps, so stats reproduce bit for bit.
        const double gap_ms = std::strtod(fields[3].c_str(), nullptr);
        if (gap_ms > 0) fps.push_back(1000.0 / gap_ms);
      }
    } else if (kind == "count" && fields.size() >= 3 && fields[1] == "indeterminate") {
      stats.n_indeterminate = static_cast<size_t>(std::strtoull(fields[2].c_str(), nullptr, 10));
    }
  }
  if (!saw_any) return std::nullopt;
  const StreamStats computed = compute_stats(delay_ms, fps);
  stats.fps_avg = computed.fps_avg;
  stats.fps_std = computed.fps_std;
  stats.delay_avg_ms = computed.delay_avg_ms;
  stats.delay_std_ms = computed.delay_std_ms;
  return stats;
}

std::string format_summary(const StreamStats& stats, size_t missed) {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "            FPS                 Delay (ms)\n"
                "          Avg      Std        Avg        Std\n"
                "stream  %7.2f  %7.2f  %9.2f  %9.2f\n"
                "frames=%zu toggles=%zu indeterminate=%zu missed=%zu",
                stats.fps_avg, stats.fps_std, stats.delay_avg_ms, stats.delay_std_ms,
                stats.n_frames, stats.n_toggles, stats.n_indeterminate, missed);
  return buf;
}

HarnessRecorder::HarnessRecorder(double classify_fraction)
    : classify_fraction_(classify_fraction) {}

void HarnessRecorder::record_toggle(uint64_t display_ts_us, TargetColor color) {
  std::lock_guard lock(mutex_);
  log_.toggles.push_back({display_ts_us, color});
}

void HarnessRecorder::on_image_envelope(const Envelope& env, uint64_t recv_ts_us) {
  auto payload = decode_image_payload(env.payload);
  if (!payload || payload->format != ImageFormat::kJpegGray) {
    std::lock_guard lock(mutex_);
    ++decode_failures_;
    return;
  }
  auto decoded = decode_jpeg_gray(payload->data);
  if (std::holds_alternative<JpegDecodeError>(decoded)) {
    log_warn("harness", "JPEG decode failed: %s",
             std::get<JpegDecodeError>(decoded).message.c_str());
    std::lock_guard lock(mutex_);
    ++decode_failures_;
    return;
  }
  FrameObservation obs;
  obs.recv_ts_us = recv_ts_us;
  obs.capture_ts_us = payload->capture_ts_us;
  obs.seq = env.seq;
  obs.classification = classify_frame(std::get<GrayFrame>(decoded), classify_fraction_);
  std::lock_guard lock(mutex_);
  log_.observations.push_back(obs);
}

size_t HarnessRecorder::observation_count() const {
  std::lock_guard lock(mutex_);
  return log_.observations.size();
}

ExperimentLog HarnessRecorder::snapshot() const {
  std::lock_guard lock(mutex_);
  return log_;
}

HarnessOutcome run_harness_live(const HarnessConfig& config, std::stop_token stop) {
  HarnessOutcome outcome;
  if (!config.valid()) {
    log_error("harness", "invalid configuration");
    outcome.exit_code = 1;
    return outcome;
  }

  auto bus = TcpBusClient::connect({.broker = config.bus});
  if (!bus) {
    log_error("harness", "cannot reach bus at %s", config.bus.str().c_str());
    return outcome;
  }

  HarnessRecorder recorder(config.classify_fraction);
  bus->subscribe(config.image_topic, [&recorder](const Envelope& env) {
    recorder.on_image_envelope(env, wall_now_us());
  });

  const uint64_t t0 = wall_now_us();
  bool frames_checked = false;
  bool interrupted = false;
  TargetColor color = TargetColor::kBlack;  // starts from BLACK

  for (size_t i = 0; i < config.n_toggles + 1; ++i) {
    const uint64_t due = t0 + i * config.period_us;
    while (wall_now_us() < due) {
      if (stop.stop_requested()) {
        interrupted = true;
        break;
      }
      if (!frames_checked && wall_now_us() >= t0 + config.no_frame_timeout_us) {
        frames_checked = true;
        if (recorder.observation_count() == 0) {
          log_error("harness", "no frames within %.1f s of start; is the pipeline up?",
                    config.no_frame_timeout_us / 1e6);
          return outcome;
        }
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
    if (interrupted) break;
    if (i == config.n_toggles) break;  // final period only drains observations

    try {
      const uint64_t display_ts = wall_now_us();
      bus->publish(kTopicTarget, MsgType::kTargetSet, encode_target(color));
      recorder.record_toggle(display_ts, color);
    } catch (const ConnectionError& e) {
      log_error("harness", "bus connection lost: %s", e.what());
      return outcome;
    }
    color = color == TargetColor::kBlack ? TargetColor::kWhite : TargetColor::kBlack;
  }

  bus->close();
  outcome.log = recorder.snapshot();
  const ExperimentReport report = analyze(outcome.log);

  std::ofstream csv(config.out_csv);
  if (!csv) {
    log_error("harness", "cannot write %s", config.out_csv.c_str());
    return outcome;
  }
  write_report_csv(csv, outcome.log, report);
  csv.close();
  log_info("harness", "report written to %s%s", config.out_csv.c_str(),
           interrupted ? " (partial, interrupted)" : "");

  outcome.report = report;
  outcome.exit_code = 0;
  return outcome;
}

}  // namespace skybridge

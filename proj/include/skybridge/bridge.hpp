// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <stop_token>
#include <string>

#include "skybridge/bus.hpp"
#include "skybridge/frame.hpp"
#include "skybridge/net.hpp"
#include "skybridge/payloads.hpp"

namespace skybridge {

struct BridgeConfig {
  Endpoint bus{"127.0.0.1", 7447};
  Endpoint link{"127.0.0.1", 7448};
  uint32_t skip_frame = 2;
  int jpeg_quality = 90;
  std::string image_topic = kTopicImage;
  double command_rate_hz = 20.0;

  bool valid() const {
    return skip_frame >= 1 && jpeg_quality >= 1 && jpeg_quality <= 100 &&
           command_rate_hz >= 5.0 && command_rate_hz <= 25.0 &&
           topic_is_valid(image_topic);
  }
};

// Relay logic between bus and drone link, transport-agnostic. Frame path:
// skip filter on the frame's own seq, grayscale NV21 trick, JPEG encode,
// publish with the original capture timestamp. Control path: latest stick
// command is forwarded on a fixed-period clock; after one silent period the
// last command is re-sent for up to a second, then forwarding stops so the
// drone watchdog can trip. The two paths share only the latest-command
// cell.
class BridgeCore {
 public:
  using ImageSink = std::function<void(const ImagePayload&)>;
  using CommandSink = std::function<void(const VirtualStickCommand&)>;
  using GimbalSink = std::function<void(const GimbalCommand&)>;

  BridgeCore(const BridgeConfig& config, ImageSink image_sink,
             CommandSink command_sink, GimbalSink gimbal_sink);

  // Frame path; caller guarantees frames arrive in seq order.
  void on_frame(const Yuv420Frame& frame);

  // Control path.
  void on_stick_payload(std::span<const uint8_t> payload, uint64_t now_us);
  void on_gimbal_payload(std::span<const uint8_t> payload);
  void command_tick(uint64_t now_us);

  uint64_t command_period_us() const { return command_period_us_; }
  uint64_t frames_seen() const { return frames_seen_.load(); }
  uint64_t frames_published() const { return frames_published_.load(); }
  uint64_t commands_forwarded() const { return commands_forwarded_.load(); }

  static constexpr uint64_t kStaleResendLimitUs = 1'000'000;

 private:
  BridgeConfig config_;
  ImageSink image_sink_;
  CommandSink command_sink_;
  GimbalSink gimbal_sink_;
  uint64_t command_period_us_;

  std::mutex cmd_mutex_;
  std::optional<VirtualStickCommand> latest_cmd_;
  uint64_t latest_cmd_arrival_us_ = 0;

  std::atomic<uint64_t> frames_seen_{0};
  std::atomic<uint64_t> frames_published_{0};
  std::atomic<uint64_t> commands_forwarded_{0};
};

// Live role: connects to the bus and the drone link, runs the frame path
// off the link reader and the control path off a fixed-period ticker. On
// bus disconnect the bridge reconnects with backoff while the frame path
// pauses. Returns a process exit code.
int run_bridge_live(const BridgeConfig& config, std::stop_token stop);

}  // namespace skybridge

// SPDX-License-Identifier: Apache-2.0
#include "skybridge/bridge.hpp"

#include <chrono>
#include <cmath>
#include <thread>

#include "skybridge/bus_client.hpp"
#include "skybridge/jpeg.hpp"
#include "skybridge/log.hpp"

namespace skybridge {

BridgeCore::BridgeCore(const BridgeConfig& config, ImageSink image_sink,
                       CommandSink command_sink, GimbalSink gimbal_sink)
    : config_(config),
      image_sink_(std::move(image_sink)),
      command_sink_(std::move(command_sink)),
      gimbal_sink_(std::move(gimbal_sink)),
      command_period_us_(static_cast<uint64_t>(std::llround(1e6 / config.command_rate_hz))) {}

void BridgeCore::on_frame(const Yuv420Frame& frame) {
  frames_seen_.fetch_add(1);
  if (!skip_filter(frame.seq, config_.skip_frame)) return;

  const GrayFrame gray = nv21_to_gray(yuv420_to_nv21_gray(frame));
  const JpegFrame jpeg =
      encode_jpeg_gray(gray, config_.jpeg_quality, frame.capture_ts_us, frame.seq);
  image_sink_(image_payload_from_jpeg(jpeg, static_cast<uint16_t>(frame.width),
                                      static_cast<uint16_t>(frame.height)));
  frames_published_.fetch_add(1);
}

void BridgeCore::on_stick_payload(std::span<const uint8_t> payload, uint64_t now_us) {
  auto cmd = decode_virtual_stick(payload);
  if (!cmd) {
    log_warn("bridge", "malformed VIRTUAL_STICK payload (%zu bytes)", payload.size());
    return;
  }
  std::lock_guard lock(cmd_mutex_);
  latest_cmd_ = *cmd;
  latest_cmd_arrival_us_ = now_us;
}

void BridgeCore::on_gimbal_payload(std::span<const uint8_t> payload) {
  auto cmd = decode_gimbal(payload);
  if (!cmd) {
    log_warn("bridge", "malformed GIMBAL payload (%zu bytes)", payload.size());
    return;
  }
  gimbal_sink_(*cmd);  // forwarded immediately, not rate-limited
}

void BridgeCore::command_tick(uint64_t now_us) {
  std::optional<VirtualStickCommand> to_send;
  {
    std::lock_guard lock(cmd_mutex_);
    if (latest_cmd_) {
      // Fresh commands always go out; a stale one is re-sent for up to a
      // second after its arrival, then the relay goes silent.
      if (now_us <= latest_cmd_arrival_us_ + kStaleResendLimitUs) {
        to_send = *latest_cmd_;
      }
    }
  }
  if (to_send) {
    command_sink_(*to_send);
    commands_forwarded_.fetch_add(1);
  }
}

namespace {

constexpr size_t kRecvChunk = 256 * 1024;

struct BusSession {
  std::unique_ptr<TcpBusClient> client;

  bool open(const BridgeConfig& config, BridgeCore& core) {
    client = TcpBusClient::connect({.broker = config.bus});
    if (!client) return false;
    client->subscribe(kTopicVirtualStick, [&core](const Envelope& env) {
      core.on_stick_payload(env.payload, wall_now_us());
    });
    client->subscribe(kTopicGimbal, [&core](const Envelope& env) {
      core.on_gimbal_payload(env.payload);
    });
    return true;
  }
};

}  // namespace

int run_bridge_live(const BridgeConfig& config, std::stop_token stop) {
  if (!config.valid()) {
    log_error("bridge", "invalid configuration");
    return 1;
  }

  // The drone link may come up after us; retry for a few seconds.
  std::optional<Socket> link;
  for (int attempt = 0; attempt < 100 && !stop.stop_requested(); ++attempt) {
    link = tcp_connect(config.link, 500);
    if (link) break;
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
  }
  if (!link) {
    log_error("bridge", "cannot reach drone link at %s", config.link.str().c_str());
    return 2;
  }
  link->set_recv_timeout_ms(100);

  std::mutex bus_mutex;
  BusSession bus;

  std::mutex link_send_mutex;
  auto send_link_envelope = [&](MsgType type, const std::string& topic,
                                std::vector<uint8_t> payload) {
    Envelope env;
    env.msg_type = type;
    env.topic = topic;
    env.send_ts_us = wall_now_us();
    env.payload = std::move(payload);
    std::lock_guard lock(link_send_mutex);
    if (!link->send_all(encode_envelope(env))) {
      log_error("bridge", "drone link lost");
    }
  };

  BridgeCore core(
      config,
      [&](const ImagePayload& payload) {
        std::lock_guard lock(bus_mutex);
        if (!bus.client || !bus.client->connected()) {
          throw ConnectionError("bus unavailable");
        }
        bus.client->publish(config.image_topic, MsgType::kImage,
                            encode_image_payload(payload));
      },
      [&](const VirtualStickCommand& cmd) {
        send_link_envelope(MsgType::kVirtualStick, kTopicVirtualStick,
                           encode_virtual_stick(cmd));
      },
      [&](const GimbalCommand& cmd) {
        send_link_envelope(MsgType::kGimbal, kTopicGimbal, encode_gimbal(cmd));
      });

  {
    std::lock_guard lock(bus_mutex);
    if (!bus.open(config, core)) {
      log_error("bridge", "cannot reach bus at %s", config.bus.str().c_str());
      return 2;
    }
  }
  log_info("bridge", "relaying; skip_frame=%u quality=%d rate=%.1f Hz",
           config.skip_frame, config.jpeg_quality, config.command_rate_hz);

  // Control ticker.
  std::jthread command_ticker([&](std::stop_token tick_stop) {
    uint64_t next_due = wall_now_us();
    while (!tick_stop.stop_requested()) {
      const uint64_t now = wall_now_us();
      if (now < next_due) {
        std::this_thread::sleep_for(
            std::chrono::microseconds(std::min<uint64_t>(next_due - now, 20'000)));
        continue;
      }
      core.command_tick(now);
      next_due += core.command_period_us();
      if (next_due < now) next_due = now + core.command_period_us();
    }
  });

  // Bus reconnect with backoff; the frame path pauses while disconnected.
  auto ensure_bus = [&](const std::stop_token& st) {
    int backoff_ms = 250;
    for (;;) {
      {
        std::lock_guard lock(bus_mutex);
        if (bus.client && bus.client->connected()) return true;
      }
      if (st.stop_requested()) return false;
      log_warn("bridge", "bus disconnected, retrying in %d ms", backoff_ms);
      std::this_thread::sleep_for(std::chrono::milliseconds(backoff_ms));
      backoff_ms = std::min(backoff_ms * 2, 2000);
      std::lock_guard lock(bus_mutex);
      if (bus.open(config, core)) {
        log_info("bridge", "bus reconnected");
        return true;
      }
    }
  };

  // Frame path off the link reader, on this thread.
  EnvelopeReader reader;
  std::vector<uint8_t> chunk(kRecvChunk);
  int exit_code = 0;
  while (!stop.stop_requested()) {
    size_t received = 0;
    const RecvStatus status = link->recv_some(chunk.data(), chunk.size(), &received);
    if (status == RecvStatus::kTimeout) continue;
    if (status != RecvStatus::kData) {
      if (!stop.stop_requested()) {
        log_error("bridge", "drone link closed");
        exit_code = 2;
      }
      break;
    }
    reader.feed({chunk.data(), received});
    for (;;) {
      auto item = reader.next();
      if (!item) break;
      if (std::holds_alternative<WireError>(*item)) {
        log_error("bridge", "drone link wire error (%s)",
                  to_string(std::get<WireError>(*item)));
        exit_code = 2;
        break;
      }
      const Envelope& env = std::get<Envelope>(*item);
      if (env.msg_type != MsgType::kImage) continue;
      auto payload = decode_image_payload(env.payload);
      if (!payload) {
        log_warn("bridge", "malformed image payload from link");
        continue;
      }
      auto frame = yuv_from_image_payload(*payload);
      if (!frame) {
        log_warn("bridge", "unexpected image format %d on link",
                 static_cast<int>(payload->format));
        continue;
      }
      frame->seq = env.seq;
      for (;;) {
        try {
          core.on_frame(*frame);
          break;
        } catch (const ConnectionError&) {
          if (!ensure_bus(stop)) break;
        }
      }
    }
    if (exit_code != 0) break;
  }

  command_ticker.request_stop();
  link->shutdown_both();
  {
    std::lock_guard lock(bus_mutex);
    if (bus.client) bus.client->close();
  }
  return stop.stop_requested() ? 0 : exit_code;
}

}  // namespace skybridge

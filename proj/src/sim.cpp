// SPDX-License-Identifier: Apache-2.0
#include "skybridge/sim.hpp"

#include <algorithm>
#include <chrono>
#include <memory>
#include <thread>

#include "skybridge/bus_client.hpp"
#include "skybridge/log.hpp"

namespace skybridge {

namespace {
constexpr const char* kLinkCameraTopic = "link/camera";
constexpr int kAcceptTimeoutMs = 200;
constexpr size_t kRecvChunk = 64 * 1024;

void sleep_until_us(uint64_t due_us, const std::stop_token& stop) {
  for (;;) {
    if (stop.stop_requested()) return;
    const uint64_t now = wall_now_us();
    if (now >= due_us) return;
    const uint64_t wait = std::min<uint64_t>(due_us - now, 20'000);
    std::this_thread::sleep_for(std::chrono::microseconds(wait));
  }
}

}  // namespace

CameraSim::CameraSim(const SimConfig& config, uint64_t start_ts_us)
    : config_(config), start_ts_us_(start_ts_us), drone_(start_ts_us) {}

uint64_t CameraSim::frame_due_us(uint32_t frame_index) const {
  const double period_us = 1e6 / config_.camera_fps;
  return start_ts_us_ + static_cast<uint64_t>(std::llround(frame_index * period_us));
}

uint64_t CameraSim::telemetry_due_us(uint32_t tick_index) const {
  const double period_us = 1e6 / config_.telemetry_hz;
  return start_ts_us_ + static_cast<uint64_t>(std::llround(tick_index * period_us));
}

Yuv420Frame CameraSim::frame_tick(uint64_t t_us) {
  drone_.advance_to(t_us);
  return render_camera(drone_.state(), scene_, config_.width, config_.height, t_us,
                       next_seq_++);
}

TelemetrySample CameraSim::telemetry_tick(uint64_t t_us) {
  drone_.advance_to(t_us);
  const DroneState& state = drone_.state();
  TelemetrySample sample;
  sample.position = state.position;
  sample.yaw_deg = state.yaw_deg;
  sample.mode = state.mode;
  sample.gimbal_pitch_deg = state.gimbal_pitch_deg;
  return sample;
}

void CameraSim::set_target(TargetColor color, uint64_t t_us) {
  drone_.advance_to(t_us);
  scene_.target_color = color;
}

void CameraSim::submit_stick(const VirtualStickCommand& cmd, uint64_t t_us) {
  drone_.submit_virtual_stick(cmd, t_us);
}

void CameraSim::submit_gimbal(const GimbalCommand& cmd, uint64_t t_us) {
  drone_.submit_gimbal(cmd, t_us);
}

int run_sim_live(const SimConfig& config, std::stop_token stop,
                 std::promise<uint16_t>* link_port_ready) {
  if (!config.valid()) {
    if (link_port_ready) link_port_ready->set_value(0);
    log_error("sim", "invalid configuration");
    return 1;
  }

  std::mutex sim_mutex;
  CameraSim sim(config, wall_now_us());

  // Bus session with reconnect: carries harness/target in and telemetry out.
  std::mutex bus_mutex;
  std::unique_ptr<TcpBusClient> bus;
  auto open_bus = [&]() -> bool {
    auto client = TcpBusClient::connect({.broker = config.bus});
    if (!client) return false;
    client->subscribe(kTopicTarget, [&](const Envelope& env) {
      if (auto color = decode_target(env.payload)) {
        std::lock_guard lock(sim_mutex);
        sim.set_target(*color, wall_now_us());
      } else {
        log_warn("sim", "malformed TARGET_SET payload (%zu bytes)", env.payload.size());
      }
    });
    bus = std::move(client);
    return true;
  };

  {
    std::lock_guard lock(bus_mutex);
    if (!open_bus()) {
      if (link_port_ready) link_port_ready->set_value(0);
      log_error("sim", "cannot reach bus at %s", config.bus.str().c_str());
      return 2;
    }
  }

  auto listener = TcpListener::bind(config.link_host, config.link_port);
  if (!listener) {
    if (link_port_ready) link_port_ready->set_value(0);
    log_error("sim", "cannot listen on link port %u", config.link_port);
    return 2;
  }
  if (link_port_ready) link_port_ready->set_value(listener->port());
  log_info("sim", "camera %dx%d @ %.1f fps, link port %u, delay %.0f ms jitter %.0f ms",
           config.width, config.height, config.camera_fps, listener->port(),
           config.link.base_delay_ms, config.link.jitter_ms);

  // Active link connection, replaced when a new bridge connects.
  std::mutex link_mutex;
  std::shared_ptr<Socket> link_socket;

  // Enough in-flight frames to cover the modeled delay, then drop-oldest.
  const size_t queue_cap = std::max<size_t>(
      64, static_cast<size_t>(config.link.base_delay_ms / 1000.0 * config.camera_fps) * 2);
  DelayedQueue<std::vector<uint8_t>> frame_queue(queue_cap);
  LinkScheduler frame_link(config.link, config.seed);
  LinkModel command_model = config.link;
  LinkScheduler command_link(command_model, config.seed + 1);

  std::jthread link_writer([&](std::stop_token writer_stop) {
    while (!writer_stop.stop_requested()) {
      auto bytes = frame_queue.pop_due();
      if (!bytes) return;
      std::shared_ptr<Socket> target;
      {
        std::lock_guard lock(link_mutex);
        target = link_socket;
      }
      if (target && !target->send_all(*bytes)) {
        if (!stop.stop_requested()) {
          log_warn("sim", "link send failed, dropping connection");
        }
        std::lock_guard lock(link_mutex);
        if (link_socket == target) link_socket.reset();
      }
    }
  });

  std::jthread link_acceptor([&](std::stop_token accept_stop) {
    std::vector<std::jthread> readers;
    while (!accept_stop.stop_requested()) {
      auto accepted = listener->accept(kAcceptTimeoutMs);
      if (!accepted) continue;
      auto socket = std::make_shared<Socket>(std::move(*accepted));
      socket->set_recv_timeout_ms(100);
      {
        std::lock_guard lock(link_mutex);
        if (link_socket) link_socket->shutdown_both();
        link_socket = socket;
      }
      log_info("sim", "bridge connected on the drone link");
      readers.emplace_back([&, socket](std::stop_token reader_stop) {
        EnvelopeReader reader;
        uint8_t chunk[kRecvChunk];
        while (!reader_stop.stop_requested()) {
          size_t received = 0;
          const RecvStatus status = socket->recv_some(chunk, sizeof chunk, &received);
          if (status == RecvStatus::kTimeout) continue;
          if (status != RecvStatus::kData) return;
          reader.feed({chunk, received});
          for (;;) {
            auto item = reader.next();
            if (!item) break;
            if (std::holds_alternative<WireError>(*item)) {
              log_warn("sim", "link wire error (%s)", to_string(std::get<WireError>(*item)));
              return;
            }
            const Envelope& env = std::get<Envelope>(*item);
            const uint64_t now = wall_now_us();
            if (env.msg_type == MsgType::kVirtualStick) {
              if (auto cmd = decode_virtual_stick(env.payload)) {
                uint64_t when = now;
                if (command_model.delay_commands) {
                  std::lock_guard lock(sim_mutex);
                  when = command_link.delivery_for(now);
                }
                if (when <= now) {
                  std::lock_guard lock(sim_mutex);
                  sim.submit_stick(*cmd, now);
                } else {
                  // Rare path: command-direction delay configured.
                  std::this_thread::sleep_for(std::chrono::microseconds(when - now));
                  std::lock_guard lock(sim_mutex);
                  sim.submit_stick(*cmd, wall_now_us());
                }
              }
            } else if (env.msg_type == MsgType::kGimbal) {
              if (auto cmd = decode_gimbal(env.payload)) {
                std::lock_guard lock(sim_mutex);
                sim.submit_gimbal(*cmd, now);
              }
            }
          }
        }
      });
    }
  });

  std::jthread telemetry_thread([&](std::stop_token telem_stop) {
    uint32_t tick = 0;
    uint64_t next_retry_us = 0;
    uint64_t backoff_us = 250'000;
    while (!telem_stop.stop_requested()) {
      uint64_t due;
      {
        std::lock_guard lock(sim_mutex);
        due = sim.telemetry_due_us(tick);
      }
      sleep_until_us(due, telem_stop);
      if (telem_stop.stop_requested()) return;
      TelemetrySample sample;
      {
        std::lock_guard lock(sim_mutex);
        sample = sim.telemetry_tick(wall_now_us());
      }
      {
        std::lock_guard lock(bus_mutex);
        if (bus && bus->connected()) {
          try {
            bus->publish(kTopicTelemetry, MsgType::kTelemetry, encode_telemetry(sample));
            backoff_us = 250'000;
          } catch (const ConnectionError&) {
            log_warn("sim", "bus connection lost, reconnecting");
            next_retry_us = wall_now_us() + backoff_us;
          }
        } else if (wall_now_us() >= next_retry_us) {
          if (open_bus()) {
            log_info("sim", "bus reconnected");
          } else {
            next_retry_us = wall_now_us() + backoff_us;
            backoff_us = std::min<uint64_t>(backoff_us * 2, 2'000'000);
          }
        }
      }
      ++tick;
    }
  });

  // Frame loop on the calling thread.
  uint32_t frame_index = 0;
  while (!stop.stop_requested()) {
    uint64_t due;
    {
      std::lock_guard lock(sim_mutex);
      due = sim.frame_due_us(frame_index);
    }
    sleep_until_us(due, stop);
    if (stop.stop_requested()) break;

    const uint64_t now = wall_now_us();
    Envelope env;
    uint64_t delivery;
    {
      std::lock_guard lock(sim_mutex);
      Yuv420Frame frame = sim.frame_tick(now);
      env.msg_type = MsgType::kImage;
      env.topic = kLinkCameraTopic;
      env.send_ts_us = now;
      env.seq = frame.seq;
      env.payload = encode_image_payload(image_payload_from_yuv(frame));
      delivery = frame_link.delivery_for(now);
    }
    frame_queue.push(delivery, encode_envelope(env));
    ++frame_index;
  }

  frame_queue.close();
  link_writer.request_stop();
  link_acceptor.request_stop();
  telemetry_thread.request_stop();
  {
    std::lock_guard lock(link_mutex);
    if (link_socket) link_socket->shutdown_both();
  }
  listener->request_stop();
  telemetry_thread.join();
  link_acceptor.join();
  link_writer.join();
  {
    std::lock_guard lock(bus_mutex);
    if (bus) bus->close();
  }
  return 0;
}

}  // namespace skybridge

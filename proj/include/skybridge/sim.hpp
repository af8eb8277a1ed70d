// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <cstdint>
#include <future>
#include <stop_token>

#include "skybridge/bus.hpp"
#include "skybridge/drone.hpp"
#include "skybridge/link.hpp"
#include "skybridge/net.hpp"
#include "skybridge/payloads.hpp"
#include "skybridge/scene.hpp"

namespace skybridge {

struct SimConfig {
  Endpoint bus{"127.0.0.1", 7447};
  double camera_fps = 30.0;
  int width = 640;
  int height = 360;
  LinkModel link{320.0, 30.0, false};
  uint64_t seed = 42;
  double telemetry_hz = 10.0;
  std::string link_host = "127.0.0.1";
  uint16_t link_port = 7448;

  bool valid() const {
    return camera_fps > 0 && camera_fps <= 1000 && width >= 16 && height >= 16 &&
           width % 2 == 0 && height % 2 == 0 && link.base_delay_ms >= 0 &&
           link.jitter_ms >= 0;
  }
};

// Time-explicit simulator core: drone kinematics, the scene, and frame /
// telemetry generation. Drives identically off the event timeline
// (simulated time) or the live runner threads; callers serialize access.
class CameraSim {
 public:
  CameraSim(const SimConfig& config, uint64_t start_ts_us);

  uint64_t frame_due_us(uint32_t frame_index) const;
  uint64_t telemetry_due_us(uint32_t tick_index) const;

  // Renders the next camera frame at simulation time t (also advances the
  // drone to t). Frames are stamped with capture time and a running seq.
  Yuv420Frame frame_tick(uint64_t t_us);

  TelemetrySample telemetry_tick(uint64_t t_us);

  void set_target(TargetColor color, uint64_t t_us);
  void submit_stick(const VirtualStickCommand& cmd, uint64_t t_us);
  void submit_gimbal(const GimbalCommand& cmd, uint64_t t_us);

  DroneCore& drone() { return drone_; }
  const SceneConfig& scene() const { return scene_; }
  uint32_t frames_emitted() const { return next_seq_; }

 private:
  SimConfig config_;
  uint64_t start_ts_us_;
  DroneCore drone_;
  SceneConfig scene_;
  uint32_t next_seq_ = 0;
};

// Runs the simulator as a live role: frames rendered on the wall clock, the
// link model applied on a delayed writer, commands accepted from the link
// socket, telemetry published on the bus. Blocks until stopped. If
// link_port_ready is given it receives the bound link port (or 0 on
// failure). Returns a process exit code.
int run_sim_live(const SimConfig& config, std::stop_token stop,
                 std::promise<uint16_t>* link_port_ready = nullptr);

}  // namespace skybridge

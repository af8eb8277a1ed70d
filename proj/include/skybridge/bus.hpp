// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "skybridge/clock.hpp"
#include "skybridge/envelope.hpp"

namespace skybridge {

struct ConnectionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Publish/subscribe surface shared by the TCP client and the in-process bus
// used in simulated-time runs. publish() stamps send_ts_us from the run's
// clock and assigns a per-topic sequence number, which it returns. A given
// subscription's handler is never invoked concurrently with itself and
// handler exceptions are isolated per delivery.
class Bus {
 public:
  using Handler = std::function<void(const Envelope&)>;

  virtual ~Bus() = default;
  virtual uint32_t publish(const std::string& topic, MsgType type,
                           std::vector<uint8_t> payload) = 0;
  virtual uint64_t subscribe(const std::string& topic, Handler handler) = 0;
  virtual void unsubscribe(uint64_t subscription) = 0;
};

// Deterministic single-process bus: delivery happens synchronously inside
// publish(), in subscription order, with timestamps from the shared clock.
class LocalBus final : public Bus {
 public:
  explicit LocalBus(Clock& clock) : clock_(clock) {}

  uint32_t publish(const std::string& topic, MsgType type,
                   std::vector<uint8_t> payload) override;
  uint64_t subscribe(const std::string& topic, Handler handler) override;
  void unsubscribe(uint64_t subscription) override;

 private:
  struct Subscription {
    uint64_t id;
    std::string topic;
    Handler handler;
  };

  Clock& clock_;
  uint64_t next_id_ = 1;
  std::vector<Subscription> subscriptions_;
  std::map<std::string, uint32_t> next_seq_;
};

// Reserved topic names used by the stock roles.
inline constexpr const char* kTopicImage = "camera/image_jpeg";
inline constexpr const char* kTopicVirtualStick = "control/virtual_stick";
inline constexpr const char* kTopicGimbal = "control/gimbal";
inline constexpr const char* kTopicTelemetry = "drone/telemetry";
inline constexpr const char* kTopicTarget = "harness/target";

}  // namespace skybridge

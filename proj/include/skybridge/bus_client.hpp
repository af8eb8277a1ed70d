// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <memory>
#include <mutex>
#include <set>
#include <thread>

#include "skybridge/bus.hpp"
#include "skybridge/net.hpp"

namespace skybridge {

// TCP client session against the broker. Publishing sends an ADVERTISE the
// first time a topic is used; subscribing sends a SUBSCRIBE and dispatches
// deliveries from a single reader thread, so one subscription's handler is
// never invoked concurrently with itself. Once the connection drops,
// publish() raises ConnectionError until the client is recreated.
class TcpBusClient final : public Bus {
 public:
  struct Options {
    Endpoint broker{"127.0.0.1", 7447};
    int connect_timeout_ms = 2000;
    Clock* clock = nullptr;  // defaults to the wall clock
  };

  static std::unique_ptr<TcpBusClient> connect(const Options& options);
  ~TcpBusClient() override;

  uint32_t publish(const std::string& topic, MsgType type,
                   std::vector<uint8_t> payload) override;
  uint64_t subscribe(const std::string& topic, Handler handler) override;
  void unsubscribe(uint64_t subscription) override;

  bool connected() const { return connected_.load(); }
  uint64_t delivered() const { return delivered_.load(); }
  void close();

 private:
  TcpBusClient() = default;
  void reader_loop();
  void send_envelope_locked(const Envelope& env);

  Socket socket_;
  WallClock wall_clock_;
  Clock* clock_ = nullptr;
  std::thread reader_;
  std::atomic<bool> connected_{false};
  std::atomic<bool> closing_{false};
  std::atomic<uint64_t> delivered_{0};

  std::mutex send_mutex_;  // serializes writes and the per-topic counters
  std::map<std::string, uint32_t> next_seq_;
  std::set<std::string> advertised_;

  std::mutex subs_mutex_;
  struct Subscription {
    uint64_t id;
    std::string topic;
    Handler handler;
  };
  std::vector<Subscription> subscriptions_;
  uint64_t next_sub_id_ = 1;
};

}  // namespace skybridge

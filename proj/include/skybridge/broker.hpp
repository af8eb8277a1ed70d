// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include "skybridge/envelope.hpp"
#include "skybridge/net.hpp"
#include "skybridge/topic_table.hpp"

namespace skybridge {

struct BrokerStats {
  uint64_t sessions_accepted = 0;
  uint64_t envelopes_routed = 0;
  uint64_t envelopes_dropped = 0;
  uint64_t protocol_violations = 0;
};

// Star-topology message broker: accepts client sessions over TCP, routes
// published envelopes to all current subscribers of the topic, at most once
// each, preserving per-publisher order. A session must ADVERTISE a topic
// before publishing on it and a publish without ADVERTISE closes the
// session. Slow subscribers lose the oldest queued envelope first.
class Broker {
 public:
  struct Options {
    std::string host = "127.0.0.1";
    uint16_t port = 7447;
  };

  Broker() = default;
  ~Broker();
  Broker(const Broker&) = delete;
  Broker& operator=(const Broker&) = delete;

  bool start(const Options& options);
  void stop();
  bool running() const { return running_.load(); }

  uint16_t port() const { return port_; }
  BrokerStats stats() const;

 private:
  struct Session;

  void accept_loop();
  void reader_loop(std::shared_ptr<Session> session);
  void writer_loop(std::shared_ptr<Session> session);
  void route(SessionId from, const Envelope& env);
  void close_session(const std::shared_ptr<Session>& session);
  void reap_finished_sessions();

  TcpListener listener_;
  uint16_t port_ = 0;
  std::thread accept_thread_;
  std::atomic<bool> running_{false};
  std::atomic<bool> stopping_{false};

  mutable std::mutex mutex_;  // guards table_ and sessions_
  TopicTable table_;
  std::map<SessionId, std::shared_ptr<Session>> sessions_;
  SessionId next_session_id_ = 1;

  std::atomic<uint64_t> sessions_accepted_{0};
  std::atomic<uint64_t> envelopes_routed_{0};
  std::atomic<uint64_t> envelopes_dropped_{0};
  std::atomic<uint64_t> protocol_violations_{0};
};

}  // namespace skybridge

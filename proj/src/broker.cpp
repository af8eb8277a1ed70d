// SPDX-License-Identifier: Apache-2.0
#include "skybridge/broker.hpp"

#include <vector>

#include "skybridge/envelope.hpp"
#include "skybridge/log.hpp"

namespace skybridge {

namespace {
constexpr int kRecvTimeoutMs = 200;
constexpr size_t kRecvChunk = 64 * 1024;
}  // namespace

struct Broker::Session {
  SessionId id = 0;
  Socket socket;

  std::mutex mutex;
  std::condition_variable cv;
  SubscriberQueue queue;
  bool closing = false;

  std::thread reader;
  std::thread writer;
  std::atomic<bool> finished{false};
};

Broker::~Broker() { stop(); }

bool Broker::start(const Options& options) {
  auto listener = TcpListener::bind(options.host, options.port);
  if (!listener) {
    log_error("broker", "cannot listen on %s:%u", options.host.c_str(), options.port);
    return false;
  }
  listener_ = std::move(*listener);
  port_ = listener_.port();
  stopping_ = false;
  running_ = true;
  accept_thread_ = std::thread([this] { accept_loop(); });
  log_info("broker", "listening on %u", port_);
  return true;
}

void Broker::stop() {
  if (!running_.exchange(false)) return;
  stopping_ = true;
  listener_.request_stop();
  if (accept_thread_.joinable()) accept_thread_.join();
  listener_.close();

  std::map<SessionId, std::shared_ptr<Session>> sessions;
  {
    std::lock_guard lock(mutex_);
    sessions.swap(sessions_);
  }
  for (auto& [id, session] : sessions) {
    close_session(session);
    if (session->reader.joinable()) session->reader.join();
    if (session->writer.joinable()) session->writer.join();
  }
  log_info("broker", "stopped; routed=%llu dropped=%llu violations=%llu",
           static_cast<unsigned long long>(envelopes_routed_.load()),
           static_cast<unsigned long long>(envelopes_dropped_.load()),
           static_cast<unsigned long long>(protocol_violations_.load()));
}

BrokerStats Broker::stats() const {
  BrokerStats s;
  s.sessions_accepted = sessions_accepted_.load();
  s.envelopes_routed = envelopes_routed_.load();
  s.envelopes_dropped = envelopes_dropped_.load();
  s.protocol_violations = protocol_violations_.load();
  return s;
}

void Broker::accept_loop() {
  while (!stopping_.load()) {
    auto socket = listener_.accept(kRecvTimeoutMs);
    reap_finished_sessions();
    if (!socket) continue;

    auto session = std::make_shared<Session>();
    session->socket = std::move(*socket);
    session->socket.set_recv_timeout_ms(kRecvTimeoutMs);
    {
      std::lock_guard lock(mutex_);
      session->id = next_session_id_++;
      sessions_[session->id] = session;
    }
    sessions_accepted_.fetch_add(1);
    log_debug("broker", "session %llu connected", static_cast<unsigned long long>(session->id));
    session->reader = std::thread([this, session] { reader_loop(session); });
    session->writer = std::thread([this, session] { writer_loop(session); });
  }
}

void Broker::reap_finished_sessions() {
  std::vector<std::shared_ptr<Session>> done;
  {
    std::lock_guard lock(mutex_);
    for (auto it = sessions_.begin(); it != sessions_.end();) {
      if (it->second->finished.load()) {
        done.push_back(it->second);
        table_.remove_session(it->first);
        it = sessions_.erase(it);
      } else {
        ++it;
      }
    }
  }
  for (auto& session : done) {
    if (session->reader.joinable()) session->reader.join();
    if (session->writer.joinable()) session->writer.join();
  }
}

void Broker::close_session(const std::shared_ptr<Session>& session) {
  {
    std::lock_guard lock(session->mutex);
    session->closing = true;
  }
  session->socket.shutdown_both();
  session->cv.notify_all();
}

void Broker::reader_loop(std::shared_ptr<Session> session) {
  EnvelopeReader reader;
  uint8_t chunk[kRecvChunk];
  bool alive = true;

  while (alive && !stopping_.load()) {
    size_t received = 0;
    const RecvStatus status = session->socket.recv_some(chunk, sizeof chunk, &received);
    if (status == RecvStatus::kTimeout) continue;
    if (status != RecvStatus::kData) break;
    reader.feed({chunk, received});

    while (alive) {
      auto item = reader.next();
      if (!item) break;
      if (std::holds_alternative<WireError>(*item)) {
        log_warn("broker", "session %llu: wire error (%s), closing",
                 static_cast<unsigned long long>(session->id),
                 to_string(std::get<WireError>(*item)));
        alive = false;
        break;
      }
      const Envelope& env = std::get<Envelope>(*item);
      if (env.msg_type == MsgType::kSubscribe) {
        std::lock_guard lock(mutex_);
        table_.subscribe(session->id, env.topic);
      } else if (env.msg_type == MsgType::kAdvertise) {
        std::lock_guard lock(mutex_);
        table_.advertise(session->id, env.topic);
      } else {
        bool advertised;
        {
          std::lock_guard lock(mutex_);
          advertised = table_.is_advertised(session->id, env.topic);
        }
        if (!advertised) {
          protocol_violations_.fetch_add(1);
          log_warn("broker", "session %llu: publish on '%s' without ADVERTISE, closing",
                   static_cast<unsigned long long>(session->id), env.topic.c_str());
          alive = false;
          break;
        }
        route(session->id, env);
      }
    }
  }

  close_session(session);
  {
    std::lock_guard lock(mutex_);
    table_.remove_session(session->id);
  }
  session->finished.store(true);
  log_debug("broker", "session %llu closed", static_cast<unsigned long long>(session->id));
}

void Broker::route(SessionId from, const Envelope& env) {
  auto bytes = std::make_shared<const std::vector<uint8_t>>(encode_envelope(env));
  std::vector<std::shared_ptr<Session>> targets;
  {
    std::lock_guard lock(mutex_);
    for (SessionId sid : table_.subscribers(env.topic)) {
      auto it = sessions_.find(sid);
      if (it != sessions_.end()) targets.push_back(it->second);
    }
  }
  (void)from;
  for (auto& target : targets) {
    size_t dropped;
    {
      std::lock_guard lock(target->mutex);
      if (target->closing) continue;
      dropped = target->queue.push(bytes);
    }
    target->cv.notify_one();
    envelopes_routed_.fetch_add(1);
    if (dropped > 0) {
      envelopes_dropped_.fetch_add(dropped);
      log_debug("broker", "session %llu queue overflow, dropped oldest",
                static_cast<unsigned long long>(target->id));
    }
  }
}

void Broker::writer_loop(std::shared_ptr<Session> session) {
  for (;;) {
    // Drain in batches: everything queued goes out before we sleep again.
    std::vector<SubscriberQueue::Item> batch;
    {
      std::unique_lock lock(session->mutex);
      session->cv.wait(lock, [&] { return session->closing || !session->queue.empty(); });
      if (session->closing && session->queue.empty()) return;
      while (auto item = session->queue.pop()) batch.push_back(std::move(item));
    }
    for (const auto& item : batch) {
      if (!session->socket.send_all(*item)) {
        std::lock_guard lock(session->mutex);
        session->closing = true;
        return;
      }
    }
  }
}

}  // namespace skybridge

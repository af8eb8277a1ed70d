// SPDX-License-Identifier: Apache-2.0
#include "skybridge/bus_client.hpp"

#include "skybridge/log.hpp"

namespace skybridge {

namespace {
constexpr int kRecvTimeoutMs = 100;
constexpr size_t kRecvChunk = 64 * 1024;
}  // namespace

std::unique_ptr<TcpBusClient> TcpBusClient::connect(const Options& options) {
  auto socket = tcp_connect(options.broker, options.connect_timeout_ms);
  if (!socket) return nullptr;
  std::unique_ptr<TcpBusClient> client(new TcpBusClient());
  client->socket_ = std::move(*socket);
  client->socket_.set_recv_timeout_ms(kRecvTimeoutMs);
  client->clock_ = options.clock ? options.clock : &client->wall_clock_;
  client->connected_ = true;
  client->reader_ = std::thread([raw = client.get()] { raw->reader_loop(); });
  return client;
}

TcpBusClient::~TcpBusClient() { close(); }

void TcpBusClient::close() {
  if (closing_.exchange(true)) return;
  connected_ = false;
  socket_.shutdown_both();
  if (reader_.joinable()) reader_.join();
  socket_.close();
}

void TcpBusClient::send_envelope_locked(const Envelope& env) {
  if (!connected_.load()) throw ConnectionError("bus client disconnected");
  if (!socket_.send_all(encode_envelope(env))) {
    connected_ = false;
    throw ConnectionError("bus send failed");
  }
}

uint32_t TcpBusClient::publish(const std::string& topic, MsgType type,
                               std::vector<uint8_t> payload) {
  std::lock_guard lock(send_mutex_);
  if (advertised_.insert(topic).second) {
    Envelope adv;
    adv.msg_type = MsgType::kAdvertise;
    adv.topic = topic;
    adv.send_ts_us = clock_->now_us();
    send_envelope_locked(adv);
  }
  Envelope env;
  env.msg_type = type;
  env.topic = topic;
  env.send_ts_us = clock_->now_us();
  env.seq = next_seq_[topic]++;
  env.payload = std::move(payload);
  send_envelope_locked(env);
  return env.seq;
}

uint64_t TcpBusClient::subscribe(const std::string& topic, Handler handler) {
  uint64_t id;
  {
    std::lock_guard lock(subs_mutex_);
    id = next_sub_id_++;
    subscriptions_.push_back({id, topic, std::move(handler)});
  }
  Envelope sub;
  sub.msg_type = MsgType::kSubscribe;
  sub.topic = topic;
  sub.send_ts_us = clock_->now_us();
  std::lock_guard lock(send_mutex_);
  send_envelope_locked(sub);
  return id;
}

void TcpBusClient::unsubscribe(uint64_t subscription) {
  // Local removal only: the broker keeps the session subscribed but
  // deliveries are no longer dispatched.
  std::lock_guard lock(subs_mutex_);
  for (auto it = subscriptions_.begin(); it != subscriptions_.end(); ++it) {
    if (it->id == subscription) {
      subscriptions_.erase(it);
      return;
    }
  }
}

void TcpBusClient::reader_loop() {
  EnvelopeReader reader;
  uint8_t chunk[kRecvChunk];

  while (!closing_.load()) {
    size_t received = 0;
    const RecvStatus status = socket_.recv_some(chunk, sizeof chunk, &received);
    if (status == RecvStatus::kTimeout) continue;
    if (status != RecvStatus::kData) break;
    reader.feed({chunk, received});

    for (;;) {
      auto item = reader.next();
      if (!item) break;
      if (std::holds_alternative<WireError>(*item)) {
        log_error("bus", "broker sent malformed data (%s)",
                  to_string(std::get<WireError>(*item)));
        connected_ = false;
        return;
      }
      const Envelope& env = std::get<Envelope>(*item);
      std::vector<Handler> handlers;
      {
        std::lock_guard lock(subs_mutex_);
        for (const auto& sub : subscriptions_) {
          if (sub.topic == env.topic) handlers.push_back(sub.handler);
        }
      }
      for (auto& handler : handlers) {
        try {
          handler(env);
        } catch (const std::exception& e) {
          log_warn("bus", "handler for '%s' threw: %s", env.topic.c_str(), e.what());
        }
        delivered_.fetch_add(1);
      }
    }
  }
  connected_ = false;
}

}  // namespace skybridge

// SPDX-License-Identifier: Apache-2.0
#include "skybridge/bus.hpp"

#include <exception>

#include "skybridge/log.hpp"

namespace skybridge {

uint32_t LocalBus::publish(const std::string& topic, MsgType type,
                           std::vector<uint8_t> payload) {
  Envelope env;
  env.msg_type = type;
  env.topic = topic;
  env.send_ts_us = clock_.now_us();
  env.seq = next_seq_[topic]++;
  env.payload = std::move(payload);

  // Index-based loop: a handler may add subscriptions while we deliver.
  for (size_t i = 0; i < subscriptions_.size(); ++i) {
    if (subscriptions_[i].topic != topic) continue;
    try {
      subscriptions_[i].handler(env);
    } catch (const std::exception& e) {
      log_warn("bus", "handler for '%s' threw: %s", topic.c_str(), e.what());
    }
  }
  return env.seq;
}

uint64_t LocalBus::subscribe(const std::string& topic, Handler handler) {
  const uint64_t id = next_id_++;
  subscriptions_.push_back({id, topic, std::move(handler)});
  return id;
}

void LocalBus::unsubscribe(uint64_t subscription) {
  for (auto it = subscriptions_.begin(); it != subscriptions_.end(); ++it) {
    if (it->id == subscription) {
      subscriptions_.erase(it);
      return;
    }
  }
}

}  // namespace skybridge

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

namespace skybridge {

using SessionId = uint64_t;

inline constexpr size_t kSubscriberQueueDepth = 8;

// Bounded FIFO of encoded envelopes headed for one subscriber session. The
// newest data is the valuable data for live video and control, so overflow
// drops the oldest queued item and counts it.
class SubscriberQueue {
 public:
  using Item = std::shared_ptr<const std::vector<uint8_t>>;

  explicit SubscriberQueue(size_t depth = kSubscriberQueueDepth) : depth_(depth) {}

  // Returns the number of items dropped to make room (0 or 1).
  size_t push(Item item) {
    size_t dropped = 0;
    if (items_.size() >= depth_) {
      items_.pop_front();
      ++dropped_;
      dropped = 1;
    }
    items_.push_back(std::move(item));
    return dropped;
  }

  Item pop() {
    if (items_.empty()) return nullptr;
    Item front = std::move(items_.front());
    items_.pop_front();
    return front;
  }

  size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  uint64_t dropped() const { return dropped_; }

 private:
  std::deque<Item> items_;
  size_t depth_;
  uint64_t dropped_ = 0;
};

// Which session subscribes to / advertises which topic. Pure bookkeeping,
// shared by the TCP broker (under its mutex) and unit tests; a session
// appears at most once per topic and subscriber order is join order.
class TopicTable {
 public:
  void subscribe(SessionId session, const std::string& topic);
  void advertise(SessionId session, const std::string& topic);
  void remove_session(SessionId session);

  bool is_advertised(SessionId session, const std::string& topic) const;
  // True once the session has sent SUBSCRIBE or ADVERTISE for the topic.
  bool knows_topic(SessionId session, const std::string& topic) const;
  const std::vector<SessionId>& subscribers(const std::string& topic) const;

 private:
  std::map<std::string, std::vector<SessionId>> subscribers_;
  std::map<SessionId, std::set<std::string>> advertised_;
  std::map<SessionId, std::set<std::string>> known_;
};

}  // namespace skybridge

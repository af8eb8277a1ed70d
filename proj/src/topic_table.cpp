// SPDX-License-Identifier: Apache-2.0
#include "skybridge/topic_table.hpp"

#include <algorithm>

namespace skybridge {

void TopicTable::subscribe(SessionId session, const std::string& topic) {
  known_[session].insert(topic);
  auto& subs = subscribers_[topic];
  if (std::find(subs.begin(), subs.end(), session) == subs.end()) {
    subs.push_back(session);
  }
}

void TopicTable::advertise(SessionId session, const std::string& topic) {
  known_[session].insert(topic);
  advertised_[session].insert(topic);
}

void TopicTable::remove_session(SessionId session) {
  for (auto& [topic, subs] : subscribers_) {
    subs.erase(std::remove(subs.begin(), subs.end(), session), subs.end());
  }
  advertised_.erase(session);
  known_.erase(session);
}

bool TopicTable::is_advertised(SessionId session, const std::string& topic) const {
  auto it = advertised_.find(session);
  return it != advertised_.end() && it->second.count(topic) > 0;
}

bool TopicTable::knows_topic(SessionId session, const std::string& topic) const {
  auto it = known_.find(session);
  return it != known_.end() && it->second.count(topic) > 0;
}

const std::vector<SessionId>& TopicTable::subscribers(const std::string& topic) const {
  static const std::vector<SessionId> kEmpty;
  auto it = subscribers_.find(topic);
  return it == subscribers_.end() ? kEmpty : it->second;
}

}  // namespace skybridge

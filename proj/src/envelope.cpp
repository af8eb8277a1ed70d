// SPDX-License-Identifier: Apache-2.0
#include "skybridge/envelope.hpp"

#include <cstring>
#include <stdexcept>

#include "skybridge/wire.hpp"

namespace skybridge {

namespace {

enum class ParseStatus { kOk, kNeedMore, kError };

// Shared by the one-shot decoder and the stream reader. When the input is a
// complete buffer, kNeedMore maps to kTruncated; on a stream it means "wait
// for more bytes". Header fields are validated as soon as they are visible
// so oversized or garbage prefixes fail before any payload buffering.
ParseStatus parse_envelope(std::span<const uint8_t> buf, size_t max_payload,
                           Envelope* out, size_t* consumed, WireError* error) {
  if (buf.size() >= 4 && std::memcmp(buf.data(), kEnvelopeMagic, 4) != 0) {
    *error = WireError::kBadMagic;
    return ParseStatus::kError;
  }
  if (buf.size() >= 5 && buf[4] != kEnvelopeVersion) {
    *error = WireError::kUnsupportedVersion;
    return ParseStatus::kError;
  }
  if (buf.size() < 8) return ParseStatus::kNeedMore;
  ByteReader header(buf.subspan(6));
  const uint16_t topic_len = header.u16be();
  if (topic_len == 0) {
    *error = WireError::kBadTopic;
    return ParseStatus::kError;
  }
  if (topic_len > kMaxTopicBytes) {
    *error = WireError::kOversizedTopic;
    return ParseStatus::kError;
  }
  // magic..topic_len (8) + topic + send_ts(8) + seq(4) + payload_len(4)
  const size_t before_payload = 8 + topic_len + 16;
  if (buf.size() < before_payload) return ParseStatus::kNeedMore;

  ByteReader rest(buf.subspan(8));
  const auto topic_bytes = rest.view(topic_len);
  std::string topic(reinterpret_cast<const char*>(topic_bytes.data()), topic_len);
  if (!topic_is_valid(topic)) {
    *error = WireError::kBadTopic;
    return ParseStatus::kError;
  }
  const uint64_t send_ts_us = rest.u64be();
  const uint32_t seq = rest.u32be();
  const uint32_t payload_len = rest.u32be();
  if (payload_len > max_payload) {
    *error = WireError::kTruncated;
    return ParseStatus::kError;
  }
  if (buf.size() - before_payload < payload_len) return ParseStatus::kNeedMore;

  out->msg_type = static_cast<MsgType>(buf[5]);
  out->topic = std::move(topic);
  out->send_ts_us = send_ts_us;
  out->seq = seq;
  const auto payload = rest.view(payload_len);
  out->payload.assign(payload.begin(), payload.end());
  *consumed = before_payload + payload_len;
  return ParseStatus::kOk;
}

}  // namespace

const char* to_string(MsgType type) {
  switch (type) {
    case MsgType::kImage: return "IMAGE";
    case MsgType::kVirtualStick: return "VIRTUAL_STICK";
    case MsgType::kGimbal: return "GIMBAL";
    case MsgType::kTelemetry: return "TELEMETRY";
    case MsgType::kTargetSet: return "TARGET_SET";
    case MsgType::kSubscribe: return "SUBSCRIBE";
    case MsgType::kAdvertise: return "ADVERTISE";
  }
  return "UNKNOWN";
}

const char* to_string(WireError error) {
  switch (error) {
    case WireError::kBadMagic: return "bad magic";
    case WireError::kUnsupportedVersion: return "unsupported version";
    case WireError::kTruncated: return "truncated";
    case WireError::kOversizedTopic: return "oversized topic";
    case WireError::kBadTopic: return "bad topic";
  }
  return "unknown wire error";
}

bool topic_is_valid(std::string_view topic) {
  if (topic.empty() || topic.size() > kMaxTopicBytes) return false;
  for (unsigned char c : topic) {
    if (c < 0x20) return false;
  }
  return true;
}

std::vector<uint8_t> encode_envelope(const Envelope& env) {
  if (!topic_is_valid(env.topic)) {
    throw std::invalid_argument("envelope topic invalid: '" + env.topic + "'");
  }
  std::vector<uint8_t> out;
  out.reserve(kEnvelopeFixedBytes + env.topic.size() + env.payload.size());
  for (uint8_t b : kEnvelopeMagic) out.push_back(b);
  put_u8(out, kEnvelopeVersion);
  put_u8(out, static_cast<uint8_t>(env.msg_type));
  put_u16be(out, static_cast<uint16_t>(env.topic.size()));
  for (char c : env.topic) out.push_back(static_cast<uint8_t>(c));
  put_u64be(out, env.send_ts_us);
  put_u32be(out, env.seq);
  put_u32be(out, static_cast<uint32_t>(env.payload.size()));
  if (!env.payload.empty()) {
    const size_t header_bytes = out.size();
    out.resize(header_bytes + env.payload.size());
    std::memcpy(out.data() + header_bytes, env.payload.data(), env.payload.size());
  }
  return out;
}

std::variant<Envelope, WireError> decode_envelope(std::span<const uint8_t> buf,
                                                  size_t* consumed) {
  Envelope env;
  size_t used = 0;
  WireError error{};
  switch (parse_envelope(buf, buf.size(), &env, &used, &error)) {
    case ParseStatus::kOk:
      if (consumed) *consumed = used;
      return env;
    case ParseStatus::kNeedMore:
      return WireError::kTruncated;
    case ParseStatus::kError:
      return error;
  }
  return WireError::kTruncated;
}

EnvelopeReader::EnvelopeReader(size_t max_payload_bytes)
    : max_payload_bytes_(max_payload_bytes) {}

void EnvelopeReader::feed(std::span<const uint8_t> data) {
  // Reclaim the consumed prefix before growing; what remains is at most one
  // partial envelope, so the buffer stays bounded on long-lived streams.
  if (start_ > 0) {
    buf_.erase(buf_.begin(), buf_.begin() + static_cast<ptrdiff_t>(start_));
    start_ = 0;
  }
  buf_.insert(buf_.end(), data.begin(), data.end());
}

std::optional<std::variant<Envelope, WireError>> EnvelopeReader::next() {
  if (poisoned_) return std::nullopt;
  Envelope env;
  size_t used = 0;
  WireError error{};
  std::span<const uint8_t> pending(buf_.data() + start_, buf_.size() - start_);
  switch (parse_envelope(pending, max_payload_bytes_, &env, &used, &error)) {
    case ParseStatus::kOk:
      start_ += used;
      if (start_ == buf_.size()) {
        buf_.clear();
        start_ = 0;
      }
      return std::variant<Envelope, WireError>(std::move(env));
    case ParseStatus::kNeedMore:
      return std::nullopt;
    case ParseStatus::kError:
      poisoned_ = true;
      return std::variant<Envelope, WireError>(error);
  }
  return std::nullopt;
}

}  // namespace skybridge

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace skybridge {

// Wire envelope carried on the bus and on the drone link. Layout, all
// multi-byte integers big-endian:
//
//   magic(4) "RAPI" | version u8 | msg_type u8 | topic_len u16 | topic |
//   send_ts_us u64  | seq u32    | payload_len u32 | payload
//
// Fixed overhead is 24 bytes; total size = 24 + topic_len + payload_len.

inline constexpr uint8_t kEnvelopeMagic[4] = {0x52, 0x41, 0x50, 0x49};  // "RAPI"
inline constexpr uint8_t kEnvelopeVersion = 1;
inline constexpr size_t kEnvelopeFixedBytes = 24;
inline constexpr size_t kMaxTopicBytes = 255;

enum class MsgType : uint8_t {
  kImage = 1,
  kVirtualStick = 2,
  kGimbal = 3,
  kTelemetry = 4,
  kTargetSet = 5,
  kSubscribe = 16,
  kAdvertise = 17,
};

const char* to_string(MsgType type);

struct Envelope {
  MsgType msg_type{};
  std::string topic;
  uint64_t send_ts_us = 0;
  uint32_t seq = 0;
  std::vector<uint8_t> payload;

  bool operator==(const Envelope&) const = default;
};

// Nonempty, at most 255 bytes, no bytes below 0x20.
bool topic_is_valid(std::string_view topic);

enum class WireError : uint8_t {
  kBadMagic,
  kUnsupportedVersion,
  kTruncated,
  kOversizedTopic,
  kBadTopic,
};

const char* to_string(WireError error);

// Throws std::invalid_argument when the topic violates its invariants.
std::vector<uint8_t> encode_envelope(const Envelope& env);

// Total on arbitrary bytes: either a decoded envelope or a typed error,
// never a crash. Declared lengths are validated against the buffer before
// any allocation. On success *consumed (if given) is the exact number of
// bytes the envelope occupied; trailing bytes are ignored.
std::variant<Envelope, WireError> decode_envelope(std::span<const uint8_t> buf,
                                                  size_t* consumed = nullptr);

// Incremental framing for stream transports. feed() appends raw bytes;
// next() yields completed envelopes one at a time. A malformed prefix makes
// next() return the wire error, after which the stream is poisoned and the
// session should be closed.
class EnvelopeReader {
 public:
  // Payloads above the cap are treated as protocol errors so a bad or
  // hostile peer cannot make the reader buffer unbounded data.
  explicit EnvelopeReader(size_t max_payload_bytes = 16 * 1024 * 1024);

  void feed(std::span<const uint8_t> data);
  std::optional<std::variant<Envelope, WireError>> next();

  size_t buffered() const { return buf_.size() - start_; }

 private:
  std::vector<uint8_t> buf_;
  size_t start_ = 0;
  size_t max_payload_bytes_;
  bool poisoned_ = false;
};

}  // namespace skybridge

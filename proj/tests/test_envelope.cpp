#include <doctest.h>

#include <stdexcept>

#include <random>

#include "skybridge/envelope.hpp"
#include "test_util.hpp"

using namespace skybridge;

TEST_CASE("encode_envelope produces the documented layout") {
  Envelope env;
  env.msg_type = MsgType::kTargetSet;
  env.topic = "harness/target";
  env.send_ts_us = 0;
  env.seq = 0;
  env.payload = {0x01};

  const auto bytes = encode_envelope(env);
  // 24 fixed bytes + 14 topic + 1 payload.
  CHECK(bytes.size() == kEnvelopeFixedBytes + 14 + 1);
  const uint8_t expected_prefix[] = {0x52, 0x41, 0x50, 0x49, 0x01, 0x05, 0x00, 0x0E};
  for (size_t i = 0; i < sizeof expected_prefix; ++i) {
    CAPTURE(i);
    CHECK(bytes[i] == expected_prefix[i]);
  }
  CHECK(std::string(bytes.begin() + 8, bytes.begin() + 22) == "harness/target");
}

TEST_CASE("empty payload encodes a zero payload_len field") {
  Envelope env;
  env.msg_type = MsgType::kSubscribe;
  env.topic = "t";
  const auto bytes = encode_envelope(env);
  CHECK(bytes.size() == kEnvelopeFixedBytes + 1);
  // last four bytes are the payload length
  CHECK(bytes[bytes.size() - 4] == 0);
  CHECK(bytes[bytes.size() - 3] == 0);
  CHECK(bytes[bytes.size() - 2] == 0);
  CHECK(bytes[bytes.size() - 1] == 0);
}

TEST_CASE("encode rejects invalid topics") {
  Envelope env;
  env.topic = "";
  CHECK_THROWS_AS(encode_envelope(env), std::invalid_argument);
  env.topic = std::string(256, 'a');
  CHECK_THROWS_AS(encode_envelope(env), std::invalid_argument);
  env.topic = std::string("bad\x01topic");
  CHECK_THROWS_AS(encode_envelope(env), std::invalid_argument);
}

TEST_CASE("decode inverts encode on randomized envelopes") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 1000; ++i) {
    const Envelope env = testutil::random_envelope(rng);
    const auto bytes = encode_envelope(env);
    size_t consumed = 0;
    const auto decoded = decode_envelope(bytes, &consumed);
    REQUIRE(std::holds_alternative<Envelope>(decoded));
    CHECK(std::get<Envelope>(decoded) == env);
    CHECK(consumed == bytes.size());
  }
}

TEST_CASE("decode consumes exactly the declared length, ignoring trailing bytes") {
  std::mt19937_64 rng(8);
  Envelope env = testutil::random_envelope(rng);
  auto bytes = encode_envelope(env);
  const size_t exact = bytes.size();
  bytes.insert(bytes.end(), {0xDE, 0xAD, 0xBE, 0xEF});
  size_t consumed = 0;
  const auto decoded = decode_envelope(bytes, &consumed);
  REQUIRE(std::holds_alternative<Envelope>(decoded));
  CHECK(consumed == exact);
}

TEST_CASE("decode reports typed errors") {
  SUBCASE("bad magic") {
    const std::vector<uint8_t> buf = {'X', 'X', 'X', 'X', 1, 1, 0, 1, 'a'};
    const auto r = decode_envelope(buf);
    REQUIRE(std::holds_alternative<WireError>(r));
    CHECK(std::get<WireError>(r) == WireError::kBadMagic);
  }
  SUBCASE("unsupported version") {
    Envelope env;
    env.topic = "t";
    auto bytes = encode_envelope(env);
    bytes[4] = 9;
    const auto r = decode_envelope(bytes);
    REQUIRE(std::holds_alternative<WireError>(r));
    CHECK(std::get<WireError>(r) == WireError::kUnsupportedVersion);
  }
  SUBCASE("truncated payload") {
    Envelope env;
    env.topic = "t";
    env.payload = {1, 2, 3, 4};
    auto bytes = encode_envelope(env);
    bytes.resize(bytes.size() - 2);
    const auto r = decode_envelope(bytes);
    REQUIRE(std::holds_alternative<WireError>(r));
    CHECK(std::get<WireError>(r) == WireError::kTruncated);
  }
  SUBCASE("oversized topic length field") {
    // magic | version | type | topic_len = 0x0130 (304 > 255)
    const std::vector<uint8_t> buf = {0x52, 0x41, 0x50, 0x49, 1, 1, 0x01, 0x30};
    const auto r = decode_envelope(buf);
    REQUIRE(std::holds_alternative<WireError>(r));
    CHECK(std::get<WireError>(r) == WireError::kOversizedTopic);
  }
  SUBCASE("control bytes in topic") {
    Envelope env;
    env.topic = "ab";
    auto bytes = encode_envelope(env);
    bytes[8] = 0x07;
    const auto r = decode_envelope(bytes);
    REQUIRE(std::holds_alternative<WireError>(r));
    CHECK(std::get<WireError>(r) == WireError::kBadTopic);
  }
}

TEST_CASE("decoder is total on random buffers") {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 10'000; ++i) {
    std::vector<uint8_t> buf(rng() % (64 * 1024));
    for (auto& b : buf) b = static_cast<uint8_t>(rng());
    const auto r = decode_envelope(buf);  // must not crash
    if (std::holds_alternative<Envelope>(r)) {
      CHECK(topic_is_valid(std::get<Envelope>(r).topic));
    }
  }
}

TEST_CASE("decoder is total on mutated valid envelopes") {
  std::mt19937_64 rng(100);
  for (int i = 0; i < 2000; ++i) {
    Envelope env = testutil::random_envelope(rng, 256);
    auto bytes = encode_envelope(env);
    const int flips = 1 + static_cast<int>(rng() % 8);
    for (int f = 0; f < flips; ++f) {
      bytes[rng() % bytes.size()] = static_cast<uint8_t>(rng());
    }
    (void)decode_envelope(bytes);
  }
}

TEST_CASE("EnvelopeReader reassembles a dribbled byte stream") {
  std::mt19937_64 rng(11);
  std::vector<Envelope> sent;
  std::vector<uint8_t> stream;
  for (int i = 0; i < 20; ++i) {
    sent.push_back(testutil::random_envelope(rng, 300));
    const auto bytes = encode_envelope(sent.back());
    stream.insert(stream.end(), bytes.begin(), bytes.end());
  }

  EnvelopeReader reader;
  std::vector<Envelope> received;
  size_t offset = 0;
  while (offset < stream.size()) {
    const size_t chunk = std::min<size_t>(1 + rng() % 37, stream.size() - offset);
    reader.feed({stream.data() + offset, chunk});
    offset += chunk;
    for (;;) {
      auto item = reader.next();
      if (!item) break;
      REQUIRE(std::holds_alternative<Envelope>(*item));
      received.push_back(std::get<Envelope>(*item));
    }
  }
  CHECK(received == sent);
}

TEST_CASE("EnvelopeReader poisons the stream on a wire error") {
  EnvelopeReader reader;
  const std::vector<uint8_t> junk = {'n', 'o', 'p', 'e', 0, 0, 0, 0};
  reader.feed(junk);
  auto item = reader.next();
  REQUIRE(item.has_value());
  REQUIRE(std::holds_alternative<WireError>(*item));
  CHECK(!reader.next().has_value());
}

TEST_CASE("EnvelopeReader rejects payloads above its cap") {
  Envelope env;
  env.topic = "big";
  env.payload.assign(128, 0);
  auto bytes = encode_envelope(env);
  EnvelopeReader reader(64);  // cap below the declared length
  reader.feed(bytes);
  auto item = reader.next();
  REQUIRE(item.has_value());
  CHECK(std::holds_alternative<WireError>(*item));
}

#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "skybridge/envelope.hpp"
#include "skybridge/frame.hpp"

namespace skybridge::testutil {

inline Envelope random_envelope(std::mt19937_64& rng, size_t max_payload = 2048) {
  static const MsgType kTypes[] = {MsgType::kImage,     MsgType::kVirtualStick,
                                   MsgType::kGimbal,    MsgType::kTelemetry,
                                   MsgType::kTargetSet, MsgType::kSubscribe,
                                   MsgType::kAdvertise};
  Envelope env;
  env.msg_type = kTypes[rng() % std::size(kTypes)];
  const size_t topic_len = 1 + rng() % 255;
  env.topic.reserve(topic_len);
  for (size_t i = 0; i < topic_len; ++i) {
    env.topic.push_back(static_cast<char>(0x20 + rng() % (0xFF - 0x20)));
  }
  env.send_ts_us = rng();
  env.seq = static_cast<uint32_t>(rng());
  const size_t payload_len = rng() % (max_payload + 1);
  env.payload.resize(payload_len);
  for (auto& b : env.payload) b = static_cast<uint8_t>(rng());
  return env;
}

inline Yuv420Frame random_yuv_frame(std::mt19937_64& rng, int width, int height) {
  Yuv420Frame frame;
  frame.width = width;
  frame.height = height;
  frame.y.resize(static_cast<size_t>(width) * height);
  frame.u.resize(static_cast<size_t>(width / 2) * (height / 2));
  frame.v.resize(frame.u.size());
  for (auto& b : frame.y) b = static_cast<uint8_t>(rng());
  for (auto& b : frame.u) b = static_cast<uint8_t>(rng());
  for (auto& b : frame.v) b = static_cast<uint8_t>(rng());
  frame.capture_ts_us = rng();
  frame.seq = static_cast<uint32_t>(rng());
  return frame;
}

inline GrayFrame gradient_frame(int width, int height) {
  GrayFrame frame;
  frame.width = width;
  frame.height = height;
  frame.pixels.resize(static_cast<size_t>(width) * height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      frame.pixels[static_cast<size_t>(y) * width + x] =
          static_cast<uint8_t>((x * 224) / std::max(1, width - 1) +
                               (y * 31) / std::max(1, height - 1));
    }
  }
  return frame;
}

inline GrayFrame uniform_frame(int width, int height, uint8_t value) {
  GrayFrame frame;
  frame.width = width;
  frame.height = height;
  frame.pixels.assign(static_cast<size_t>(width) * height, value);
  return frame;
}

}  // namespace skybridge::testutil

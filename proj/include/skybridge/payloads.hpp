// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "skybridge/drone.hpp"
#include "skybridge/frame.hpp"
#include "skybridge/scene.hpp"

namespace skybridge {

// Payload layouts carried inside envelopes, all big-endian:
//   IMAGE:         width u16 | height u16 | format u8 | capture_ts_us u64 |
//                  data_len u32 | data
//   VIRTUAL_STICK: roll f32 | pitch f32 | yaw_rate f32 | vertical f32
//   GIMBAL:        pitch_deg f32 | speed_deg_s f32
//   TARGET_SET:    color u8 (0 = BLACK, 1 = WHITE)
//   TELEMETRY:     position 3xf32 | yaw f32 | mode u8 | gimbal f32
// Decoders return nullopt on any malformed input.

enum class ImageFormat : uint8_t { kYuv420p = 0, kNv21 = 1, kJpegGray = 2 };

struct ImagePayload {
  uint16_t width = 0;
  uint16_t height = 0;
  ImageFormat format = ImageFormat::kJpegGray;
  uint64_t capture_ts_us = 0;
  std::vector<uint8_t> data;
};

std::vector<uint8_t> encode_image_payload(const ImagePayload& payload);
std::optional<ImagePayload> decode_image_payload(std::span<const uint8_t> buf);

// YUV420P frames travel the drone link as y|u|v plane concatenation.
ImagePayload image_payload_from_yuv(const Yuv420Frame& frame);
std::optional<Yuv420Frame> yuv_from_image_payload(const ImagePayload& payload);
ImagePayload image_payload_from_jpeg(const JpegFrame& frame, uint16_t width,
                                     uint16_t height);

std::vector<uint8_t> encode_virtual_stick(const VirtualStickCommand& cmd);
std::optional<VirtualStickCommand> decode_virtual_stick(std::span<const uint8_t> buf);

std::vector<uint8_t> encode_gimbal(const GimbalCommand& cmd);
std::optional<GimbalCommand> decode_gimbal(std::span<const uint8_t> buf);

std::vector<uint8_t> encode_target(TargetColor color);
std::optional<TargetColor> decode_target(std::span<const uint8_t> buf);

struct TelemetrySample {
  Vec3 position;
  double yaw_deg = 0;
  FlightMode mode = FlightMode::kNormal;
  double gimbal_pitch_deg = 0;
};

std::vector<uint8_t> encode_telemetry(const TelemetrySample& sample);
std::optional<TelemetrySample> decode_telemetry(std::span<const uint8_t> buf);

}  // namespace skybridge

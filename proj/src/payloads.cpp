// SPDX-License-Identifier: Apache-2.0
#include "skybridge/payloads.hpp"

#include "skybridge/wire.hpp"

namespace skybridge {

std::vector<uint8_t> encode_image_payload(const ImagePayload& payload) {
  std::vector<uint8_t> out;
  out.reserve(17 + payload.data.size());
  put_u16be(out, payload.width);
  put_u16be(out, payload.height);
  put_u8(out, static_cast<uint8_t>(payload.format));
  put_u64be(out, payload.capture_ts_us);
  put_u32be(out, static_cast<uint32_t>(payload.data.size()));
  out.insert(out.end(), payload.data.begin(), payload.data.end());
  return out;
}

std::optional<ImagePayload> decode_image_payload(std::span<const uint8_t> buf) {
  ByteReader reader(buf);
  ImagePayload payload;
  payload.width = reader.u16be();
  payload.height = reader.u16be();
  const uint8_t format = reader.u8();
  payload.capture_ts_us = reader.u64be();
  const uint32_t data_len = reader.u32be();
  if (!reader.ok() || format > 2 || reader.remaining() != data_len) {
    return std::nullopt;
  }
  payload.format = static_cast<ImageFormat>(format);
  const auto data = reader.view(data_len);
  payload.data.assign(data.begin(), data.end());
  return payload;
}

ImagePayload image_payload_from_yuv(const Yuv420Frame& frame) {
  ImagePayload payload;
  payload.width = static_cast<uint16_t>(frame.width);
  payload.height = static_cast<uint16_t>(frame.height);
  payload.format = ImageFormat::kYuv420p;
  payload.capture_ts_us = frame.capture_ts_us;
  payload.data.reserve(frame.y.size() + frame.u.size() + frame.v.size());
  payload.data.insert(payload.data.end(), frame.y.begin(), frame.y.end());
  payload.data.insert(payload.data.end(), frame.u.begin(), frame.u.end());
  payload.data.insert(payload.data.end(), frame.v.begin(), frame.v.end());
  return payload;
}

std::optional<Yuv420Frame> yuv_from_image_payload(const ImagePayload& payload) {
  if (payload.format != ImageFormat::kYuv420p) return std::nullopt;
  Yuv420Frame frame;
  frame.width = payload.width;
  frame.height = payload.height;
  frame.capture_ts_us = payload.capture_ts_us;
  const size_t luma = static_cast<size_t>(payload.width) * payload.height;
  const size_t chroma = luma / 4;
  if (payload.data.size() != luma + 2 * chroma) return std::nullopt;
  frame.y.assign(payload.data.begin(), payload.data.begin() + luma);
  frame.u.assign(payload.data.begin() + luma, payload.data.begin() + luma + chroma);
  frame.v.assign(payload.data.begin() + luma + chroma, payload.data.end());
  if (!frame.valid()) return std::nullopt;
  return frame;
}

ImagePayload image_payload_from_jpeg(const JpegFrame& frame, uint16_t width,
                                     uint16_t height) {
  ImagePayload payload;
  payload.width = width;
  payload.height = height;
  payload.format = ImageFormat::kJpegGray;
  payload.capture_ts_us = frame.capture_ts_us;
  payload.data = frame.data;
  return payload;
}

std::vector<uint8_t> encode_virtual_stick(const VirtualStickCommand& cmd) {
  std::vector<uint8_t> out;
  out.reserve(16);
  put_f32be(out, cmd.roll);
  put_f32be(out, cmd.pitch);
  put_f32be(out, cmd.yaw_rate);
  put_f32be(out, cmd.vertical);
  return out;
}

std::optional<VirtualStickCommand> decode_virtual_stick(std::span<const uint8_t> buf) {
  if (buf.size() != 16) return std::nullopt;
  ByteReader reader(buf);
  VirtualStickCommand cmd;
  cmd.roll = reader.f32be();
  cmd.pitch = reader.f32be();
  cmd.yaw_rate = reader.f32be();
  cmd.vertical = reader.f32be();
  return cmd;
}

std::vector<uint8_t> encode_gimbal(const GimbalCommand& cmd) {
  std::vector<uint8_t> out;
  out.reserve(8);
  put_f32be(out, cmd.pitch_deg);
  put_f32be(out, cmd.speed_deg_s);
  return out;
}

std::optional<GimbalCommand> decode_gimbal(std::span<const uint8_t> buf) {
  if (buf.size() != 8) return std::nullopt;
  ByteReader reader(buf);
  GimbalCommand cmd;
  cmd.pitch_deg = reader.f32be();
  cmd.speed_deg_s = reader.f32be();
  return cmd;
}

std::vector<uint8_t> encode_target(TargetColor color) {
  return {static_cast<uint8_t>(color)};
}

std::optional<TargetColor> decode_target(std::span<const uint8_t> buf) {
  if (buf.size() != 1 || buf[0] > 1) return std::nullopt;
  return static_cast<TargetColor>(buf[0]);
}

std::vector<uint8_t> encode_telemetry(const TelemetrySample& sample) {
  std::vector<uint8_t> out;
  out.reserve(21);
  put_f32be(out, static_cast<float>(sample.position.x));
  put_f32be(out, static_cast<float>(sample.position.y));
  put_f32be(out, static_cast<float>(sample.position.z));
  put_f32be(out, static_cast<float>(sample.yaw_deg));
  put_u8(out, static_cast<uint8_t>(sample.mode));
  put_f32be(out, static_cast<float>(sample.gimbal_pitch_deg));
  return out;
}

std::optional<TelemetrySample> decode_telemetry(std::span<const uint8_t> buf) {
  if (buf.size() != 21) return std::nullopt;
  ByteReader reader(buf);
  TelemetrySample sample;
  sample.position.x = reader.f32be();
  sample.position.y = reader.f32be();
  sample.position.z = reader.f32be();
  sample.yaw_deg = reader.f32be();
  const uint8_t mode = reader.u8();
  sample.gimbal_pitch_deg = reader.f32be();
  if (mode > 1) return std::nullopt;
  sample.mode = static_cast<FlightMode>(mode);
  return sample;
}

}  // namespace skybridge

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "skybridge/frame.hpp"

namespace skybridge {

// Baseline sequential JPEG, single luminance component, standard Annex K
// quantization table scaled by the usual IJG quality formula and standard
// Huffman tables. Output starts with SOI (FFD8) and ends with EOI (FFD9).
// quality outside [1, 100] throws std::invalid_argument.
std::vector<uint8_t> encode_jpeg_gray_bytes(const GrayFrame& frame, int quality);

JpegFrame encode_jpeg_gray(const GrayFrame& frame, int quality,
                           uint64_t capture_ts_us, uint32_t seq);

struct JpegDecodeError {
  std::string message;
};

// Decodes a baseline JPEG to 8-bit luminance; color JPEGs yield their
// luminance component. Malformed input returns a typed error, never a
// crash. Backed by libjpeg, which doubles as the independent reference
// decoder for the encoder above.
std::variant<GrayFrame, JpegDecodeError> decode_jpeg_gray(std::span<const uint8_t> data);

}  // namespace skybridge

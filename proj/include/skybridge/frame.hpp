// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

namespace skybridge {

// The four stages of the image pipeline: planar YUV 4:2:0 out of the
// (simulated) video decoder, NV21 produced by the grayscale trick, the bare
// luminance plane, and the encoded JPEG.

struct Yuv420Frame {
  int width = 0;   // even, >= 2
  int height = 0;  // even, >= 2
  std::vector<uint8_t> y;  // width*height
  std::vector<uint8_t> u;  // (width/2)*(height/2)
  std::vector<uint8_t> v;  // (width/2)*(height/2)
  uint64_t capture_ts_us = 0;
  uint32_t seq = 0;

  bool valid() const;
};

struct Nv21Frame {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> y;   // width*height
  std::vector<uint8_t> vu;  // width*height/2, interleaved V,U pairs

  bool valid() const;
};

struct GrayFrame {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> pixels;  // width*height, row-major

  bool valid() const;
};

struct JpegFrame {
  std::vector<uint8_t> data;
  int quality = 0;  // 1..100
  uint64_t capture_ts_us = 0;
  uint32_t seq = 0;
};

// Zero point of 8-bit chroma; a constant-128 VU plane is true gray.
inline constexpr uint8_t kNeutralChroma = 128;

// The grayscale conversion trick: the Y plane is copied byte-for-byte, the
// interleaved VU plane is filled with neutral chroma, and the input U/V
// planes are never read, skipping the plane interleave entirely.
// Throws std::invalid_argument if the input violates its invariants.
Nv21Frame yuv420_to_nv21_gray(const Yuv420Frame& frame);

// Extracts the luminance the trick preserved. Byte-identical Y plane.
GrayFrame nv21_to_gray(const Nv21Frame& frame);

// Emit a frame iff seq % skip_frame == 0; skip_frame = 1 passes everything,
// 2 halves the rate. Throws std::invalid_argument when skip_frame is 0.
bool skip_filter(uint32_t seq, uint32_t skip_frame);

}  // namespace skybridge

// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <stdexcept>

#include "skybridge/jpeg.hpp"
#include "skybridge/wire.hpp"

namespace skybridge {

namespace {

// Natural (row-major) index of the k-th coefficient in zigzag order.
constexpr uint8_t kZigzagNatural[64] = {
    0,  1,  8,  16, 9,  2,  3,  10, 17, 24, 32, 25, 18, 11, 4,  5,
    12, 19, 26, 33, 40, 48, 41, 34, 27, 20, 13, 6,  7,  14, 21, 28,
    35, 42, 49, 56, 57, 50, 43, 36, 29, 22, 15, 23, 30, 37, 44, 51,
    58, 59, 52, 45, 38, 31, 39, 46, 53, 60, 61, 54, 47, 55, 62, 63};

// ITU T.81 Annex K.1 luminance quantization table, natural order.
constexpr uint8_t kBaseLumaQuant[64] = {
    16, 11, 10, 16, 24,  40,  51,  61,  12, 12, 14, 19, 26,  58,  60,  55,
    14, 13, 16, 24, 40,  57,  69,  56,  14, 17, 22, 29, 51,  87,  80,  62,
    18, 22, 37, 56, 68,  109, 103, 77,  24, 35, 55, 64, 81,  104, 113, 92,
    49, 64, 78, 87, 103, 121, 120, 101, 72, 92, 95, 98, 112, 100, 103, 99};

// Standard luminance Huffman table definitions (T.81 Annex K.3).
constexpr uint8_t kDcBits[16] = {0, 1, 5, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0, 0, 0};
constexpr uint8_t kDcVals[12] = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11};
constexpr uint8_t kAcBits[16] = {0, 2, 1, 3, 3, 2, 4, 3, 5, 5, 4, 4, 0, 0, 1, 0x7D};
constexpr uint8_t kAcVals[162] = {
    0x01, 0x02, 0x03, 0x00, 0x04, 0x11, 0x05, 0x12, 0x21, 0x31, 0x41, 0x06,
    0x13, 0x51, 0x61, 0x07, 0x22, 0x71, 0x14, 0x32, 0x81, 0x91, 0xA1, 0x08,
    0x23, 0x42, 0xB1, 0xC1, 0x15, 0x52, 0xD1, 0xF0, 0x24, 0x33, 0x62, 0x72,
    0x82, 0x09, 0x0A, 0x16, 0x17, 0x18, 0x19, 0x1A, 0x25, 0x26, 0x27, 0x28,
    0x29, 0x2A, 0x34, 0x35, 0x36, 0x37, 0x38, 0x39, 0x3A, 0x43, 0x44, 0x45,
    0x46, 0x47, 0x48, 0x49, 0x4A, 0x53, 0x54, 0x55, 0x56, 0x57, 0x58, 0x59,
    0x5A, 0x63, 0x64, 0x65, 0x66, 0x67, 0x68, 0x69, 0x6A, 0x73, 0x74, 0x75,
    0x76, 0x77, 0x78, 0x79, 0x7A, 0x83, 0x84, 0x85, 0x86, 0x87, 0x88, 0x89,
    0x8A, 0x92, 0x93, 0x94, 0x95, 0x96, 0x97, 0x98, 0x99, 0x9A, 0xA2, 0xA3,
    0xA4, 0xA5, 0xA6, 0xA7, 0xA8, 0xA9, 0xAA, 0xB2, 0xB3, 0xB4, 0xB5, 0xB6,
    0xB7, 0xB8, 0xB9, 0xBA, 0xC2, 0xC3, 0xC4, 0xC5, 0xC6, 0xC7, 0xC8, 0xC9,
    0xCA, 0xD2, 0xD3, 0xD4, 0xD5, 0xD6, 0xD7, 0xD8, 0xD9, 0xDA, 0xE1, 0xE2,
    0xE3, 0xE4, 0xE5, 0xE6, 0xE7, 0xE8, 0xE9, 0xEA, 0xF1, 0xF2, 0xF3, 0xF4,
    0xF5, 0xF6, 0xF7, 0xF8, 0xF9, 0xFA};

// AAN row/column scale factors: aan[0] = 1, aan[k] = cos(k*pi/16) * sqrt(2).
constexpr float kAanScale[8] = {1.0f,        1.387039845f, 1.306562965f,
                                1.175875602f, 1.0f,        0.785694958f,
                                0.541196100f, 0.275899379f};

struct HuffCode {
  uint16_t code = 0;
  uint8_t bits = 0;
};

void build_huffman(const uint8_t bits[16], const uint8_t* vals, HuffCode table[256]) {
  uint16_t code = 0;
  for (int length = 1; length <= 16; ++length) {
    for (int i = 0; i < bits[length - 1]; ++i) {
      const uint8_t symbol = *vals++;
      table[symbol].code = code++;
      table[symbol].bits = static_cast<uint8_t>(length);
    }
    code = static_cast<uint16_t>(code << 1);
  }
}

class BitWriter {
 public:
  explicit BitWriter(std::vector<uint8_t>& out) : out_(out) {}

  void put(uint32_t code, int bits) {
    acc_ = (acc_ << bits) | (code & ((1u << bits) - 1));
    count_ += bits;
    while (count_ >= 8) {
      count_ -= 8;
      const uint8_t byte = static_cast<uint8_t>(acc_ >> count_);
      out_.push_back(byte);
      if (byte == 0xFF) out_.push_back(0x00);  // marker escape
    }
  }

  void put(HuffCode code) { put(code.code, code.bits); }

  // Pads the final partial byte with 1-bits per the standard.
  void flush() {
    if (count_ > 0) {
      const int pad = 8 - count_;
      put((1u << pad) - 1, pad);
    }
  }

 private:
  std::vector<uint8_t>& out_;
  uint32_t acc_ = 0;
  int count_ = 0;
};

// amplitude -> (category, offset code); value must be nonzero.
HuffCode amplitude_code(int value) {
  int magnitude = value < 0 ? -value : value;
  uint8_t bits = 0;
  int mask = 0;
  while (magnitude > mask) {
    ++bits;
    mask = mask * 2 + 1;
  }
  HuffCode code;
  code.bits = bits;
  code.code = static_cast<uint16_t>(value < 0 ? value + mask : value);
  return code;
}

// jfdctflt-style AAN forward DCT on one row/column of a 8x8 block.
void forward_dct8(float* block, size_t stride) {
  float& d0 = block[0 * stride];
  float& d1 = block[1 * stride];
  float& d2 = block[2 * stride];
  float& d3 = block[3 * stride];
  float& d4 = block[4 * stride];
  float& d5 = block[5 * stride];
  float& d6 = block[6 * stride];
  float& d7 = block[7 * stride];

  const float tmp0 = d0 + d7, tmp7 = d0 - d7;
  const float tmp1 = d1 + d6, tmp6 = d1 - d6;
  const float tmp2 = d2 + d5, tmp5 = d2 - d5;
  const float tmp3 = d3 + d4, tmp4 = d3 - d4;

  const float tmp10 = tmp0 + tmp3, tmp13 = tmp0 - tmp3;
  const float tmp11 = tmp1 + tmp2, tmp12 = tmp1 - tmp2;

  d0 = tmp10 + tmp11;
  d4 = tmp10 - tmp11;
  const float z1 = (tmp12 + tmp13) * 0.707106781f;
  d2 = tmp13 + z1;
  d6 = tmp13 - z1;

  const float odd10 = tmp4 + tmp5;
  const float odd11 = tmp5 + tmp6;
  const float odd12 = tmp6 + tmp7;
  const float z5 = (odd10 - odd12) * 0.382683433f;
  const float z2 = 0.541196100f * odd10 + z5;
  const float z4 = 1.306562965f * odd12 + z5;
  const float z3 = odd11 * 0.707106781f;
  const float z11 = tmp7 + z3;
  const float z13 = tmp7 - z3;
  d5 = z13 + z2;
  d3 = z13 - z2;
  d1 = z11 + z4;
  d7 = z11 - z4;
}

void write_marker(std::vector<uint8_t>& out, uint8_t id, uint16_t length) {
  out.push_back(0xFF);
  out.push_back(id);
  put_u16be(out, length);
}

}  // namespace

std::vector<uint8_t> encode_jpeg_gray_bytes(const GrayFrame& frame, int quality) {
  if (quality < 1 || quality > 100) {
    throw std::invalid_argument("encode_jpeg_gray: quality must be in [1, 100]");
  }
  if (!frame.valid()) {
    throw std::invalid_argument("encode_jpeg_gray: invalid gray frame");
  }
  if (frame.width > 0xFFFF || frame.height > 0xFFFF) {
    throw std::invalid_argument("encode_jpeg_gray: frame too large for JPEG");
  }

  // IJG quality scaling of the Annex K table, clamped to [1, 255].
  const int scale = quality < 50 ? 5000 / quality : 200 - quality * 2;
  std::array<uint8_t, 64> quant{};
  for (int i = 0; i < 64; ++i) {
    const int q = (kBaseLumaQuant[i] * scale + 50) / 100;
    quant[i] = static_cast<uint8_t>(std::clamp(q, 1, 255));
  }

  // Quantization reciprocal with the AAN scale factors folded in.
  std::array<float, 64> quant_scale{};
  for (int row = 0; row < 8; ++row) {
    for (int col = 0; col < 8; ++col) {
      const int i = row * 8 + col;
      quant_scale[i] = 1.0f / (quant[i] * kAanScale[row] * kAanScale[col] * 8.0f);
    }
  }

  HuffCode dc_table[256];
  HuffCode ac_table[256];
  build_huffman(kDcBits, kDcVals, dc_table);
  build_huffman(kAcBits, kAcVals, ac_table);

  std::vector<uint8_t> out;
  out.reserve(frame.pixels.size() / 4 + 1024);

  // SOI + JFIF APP0
  out.insert(out.end(), {0xFF, 0xD8});
  write_marker(out, 0xE0, 16);
  out.insert(out.end(), {'J', 'F', 'I', 'F', 0, 1, 1, 0, 0, 1, 0, 1, 0, 0});

  // DQT, one table, zigzag order
  write_marker(out, 0xDB, 2 + 1 + 64);
  out.push_back(0x00);
  for (int k = 0; k < 64; ++k) out.push_back(quant[kZigzagNatural[k]]);

  // SOF0: 8-bit precision, one component, 1x1 sampling, quant table 0
  write_marker(out, 0xC0, 2 + 6 + 3);
  out.push_back(8);
  put_u16be(out, static_cast<uint16_t>(frame.height));
  put_u16be(out, static_cast<uint16_t>(frame.width));
  out.push_back(1);
  out.insert(out.end(), {1, 0x11, 0});

  // DHT: DC table 0 and AC table 0
  write_marker(out, 0xC4, static_cast<uint16_t>(2 + 1 + 16 + sizeof kDcVals + 1 +
                                                16 + sizeof kAcVals));
  out.push_back(0x00);
  out.insert(out.end(), std::begin(kDcBits), std::end(kDcBits));
  out.insert(out.end(), std::begin(kDcVals), std::end(kDcVals));
  out.push_back(0x10);
  out.insert(out.end(), std::begin(kAcBits), std::end(kAcBits));
  out.insert(out.end(), std::begin(kAcVals), std::end(kAcVals));

  // SOS: one component, DC/AC table 0, full spectral range
  write_marker(out, 0xDA, 2 + 1 + 2 + 3);
  out.insert(out.end(), {1, 1, 0x00, 0, 63, 0});

  BitWriter writer(out);
  const int blocks_x = (frame.width + 7) / 8;
  const int blocks_y = (frame.height + 7) / 8;
  int last_dc = 0;
  float block[64];
  int32_t quantized[64];

  for (int by = 0; by < blocks_y; ++by) {
    for (int bx = 0; bx < blocks_x; ++bx) {
      // Load with level shift; edge pixels replicate past the border.
      for (int y = 0; y < 8; ++y) {
        const int src_y = std::min(by * 8 + y, frame.height - 1);
        const uint8_t* row = frame.pixels.data() + static_cast<size_t>(src_y) * frame.width;
        for (int x = 0; x < 8; ++x) {
          const int src_x = std::min(bx * 8 + x, frame.width - 1);
          block[y * 8 + x] = static_cast<float>(row[src_x]) - 128.0f;
        }
      }

      for (int row = 0; row < 8; ++row) forward_dct8(block + row * 8, 1);
      for (int col = 0; col < 8; ++col) forward_dct8(block + col, 8);

      for (int i = 0; i < 64; ++i) {
        const float value = block[i] * quant_scale[i];
        quantized[i] = static_cast<int32_t>(std::lround(value));
      }

      // DC: difference to previous block, category + amplitude bits.
      const int dc_diff = quantized[0] - last_dc;
      last_dc = quantized[0];
      if (dc_diff == 0) {
        writer.put(dc_table[0]);
      } else {
        const HuffCode amp = amplitude_code(dc_diff);
        writer.put(dc_table[amp.bits]);
        writer.put(amp.code, amp.bits);
      }

      // AC: run-length of zeros in zigzag order, 16-zero runs as ZRL.
      int last_nonzero = 0;
      for (int k = 63; k >= 1; --k) {
        if (quantized[kZigzagNatural[k]] != 0) {
          last_nonzero = k;
          break;
        }
      }
      int run = 0;
      for (int k = 1; k <= last_nonzero; ++k) {
        int value = quantized[kZigzagNatural[k]];
        if (value == 0) {
          ++run;
          continue;
        }
        while (run >= 16) {
          writer.put(ac_table[0xF0]);  // ZRL
          run -= 16;
        }
        // Keep amplitudes inside the baseline 10-bit category range.
        value = std::clamp(value, -1023, 1023);
        const HuffCode amp = amplitude_code(value);
        writer.put(ac_table[(run << 4) | amp.bits]);
        writer.put(amp.code, amp.bits);
        run = 0;
      }
      if (last_nonzero < 63) writer.put(ac_table[0x00]);  // EOB
    }
  }
  writer.flush();

  out.insert(out.end(), {0xFF, 0xD9});
  return out;
}

JpegFrame encode_jpeg_gray(const GrayFrame& frame, int quality,
                           uint64_t capture_ts_us, uint32_t seq) {
  JpegFrame jpeg;
  jpeg.data = encode_jpeg_gray_bytes(frame, quality);
  jpeg.quality = quality;
  jpeg.capture_ts_us = capture_ts_us;
  jpeg.seq = seq;
  return jpeg;
}

}  // namespace skybridge

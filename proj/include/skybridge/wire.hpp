// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <vector>

namespace skybridge {

// Big-endian (network order) primitives shared by every wire format in the
// project: envelopes, image payloads and control payloads.

inline void put_u8(std::vector<uint8_t>& out, uint8_t v) { out.push_back(v); }

inline void put_u16be(std::vector<uint8_t>& out, uint16_t v) {
  out.push_back(static_cast<uint8_t>(v >> 8));
  out.push_back(static_cast<uint8_t>(v));
}

inline void put_u32be(std::vector<uint8_t>& out, uint32_t v) {
  out.push_back(static_cast<uint8_t>(v >> 24));
  out.push_back(static_cast<uint8_t>(v >> 16));
  out.push_back(static_cast<uint8_t>(v >> 8));
  out.push_back(static_cast<uint8_t>(v));
}

inline void put_u64be(std::vector<uint8_t>& out, uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) {
    out.push_back(static_cast<uint8_t>(v >> shift));
  }
}

inline void put_f32be(std::vector<uint8_t>& out, float v) {
  put_u32be(out, std::bit_cast<uint32_t>(v));
}

// Bounds-checked read cursor. Once a read runs past the end, ok() turns
// false and every later read returns zero instead of touching memory.
class ByteReader {
 public:
  explicit ByteReader(std::span<const uint8_t> buf) : buf_(buf) {}

  bool ok() const { return ok_; }
  size_t pos() const { return pos_; }
  size_t remaining() const { return ok_ ? buf_.size() - pos_ : 0; }

  uint8_t u8() {
    if (!take(1)) return 0;
    return buf_[pos_ - 1];
  }

  uint16_t u16be() {
    if (!take(2)) return 0;
    return static_cast<uint16_t>(buf_[pos_ - 2] << 8 | buf_[pos_ - 1]);
  }

  uint32_t u32be() {
    if (!take(4)) return 0;
    uint32_t v = 0;
    for (size_t i = pos_ - 4; i < pos_; ++i) v = v << 8 | buf_[i];
    return v;
  }

  uint64_t u64be() {
    if (!take(8)) return 0;
    uint64_t v = 0;
    for (size_t i = pos_ - 8; i < pos_; ++i) v = v << 8 | buf_[i];
    return v;
  }

  float f32be() { return std::bit_cast<float>(u32be()); }

  // Zero-copy view of the next n bytes; empty span on underrun.
  std::span<const uint8_t> view(size_t n) {
    if (!take(n)) return {};
    return buf_.subspan(pos_ - n, n);
  }

 private:
  bool take(size_t n) {
    if (!ok_ || buf_.size() - pos_ < n) {
      ok_ = false;
      return false;
    }
    pos_ += n;
    return true;
  }

  std::span<const uint8_t> buf_;
  size_t pos_ = 0;
  bool ok_ = true;
};

}  // namespace skybridge

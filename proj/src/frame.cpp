// SPDX-License-Identifier: Apache-2.0
#include "skybridge/frame.hpp"

#include <stdexcept>

namespace skybridge {

bool Yuv420Frame::valid() const {
  if (width < 2 || height < 2 || width % 2 != 0 || height % 2 != 0) return false;
  const size_t luma = static_cast<size_t>(width) * height;
  const size_t chroma = static_cast<size_t>(width / 2) * (height / 2);
  return y.size() == luma && u.size() == chroma && v.size() == chroma;
}

bool Nv21Frame::valid() const {
  if (width < 2 || height < 2 || width % 2 != 0 || height % 2 != 0) return false;
  const size_t luma = static_cast<size_t>(width) * height;
  return y.size() == luma && vu.size() == luma / 2;
}

bool GrayFrame::valid() const {
  return width > 0 && height > 0 &&
         pixels.size() == static_cast<size_t>(width) * height;
}

Nv21Frame yuv420_to_nv21_gray(const Yuv420Frame& frame) {
  if (!frame.valid()) {
    throw std::invalid_argument("yuv420_to_nv21_gray: invalid YUV420 frame");
  }
  Nv21Frame out;
  out.width = frame.width;
  out.height = frame.height;
  out.y = frame.y;
  out.vu.assign(frame.y.size() / 2, kNeutralChroma);
  return out;
}

GrayFrame nv21_to_gray(const Nv21Frame& frame) {
  if (!frame.valid()) {
    throw std::invalid_argument("nv21_to_gray: invalid NV21 frame");
  }
  GrayFrame out;
  out.width = frame.width;
  out.height = frame.height;
  out.pixels = frame.y;
  return out;
}

bool skip_filter(uint32_t seq, uint32_t skip_frame) {
  if (skip_frame == 0) {
    throw std::invalid_argument("skip_filter: skip_frame must be >= 1");
  }
  return seq % skip_frame == 0;
}

}  // namespace skybridge

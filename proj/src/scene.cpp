// SPDX-License-Identifier: Apache-2.0
#include "skybridge/scene.hpp"

#include <cmath>
#include <stdexcept>

namespace skybridge {

const char* to_string(TargetColor color) {
  return color == TargetColor::kBlack ? "BLACK" : "WHITE";
}

Rect central_region(int width, int height, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw std::invalid_argument("central_region: fraction must be in (0, 1]");
  }
  const int rw = std::max(1, static_cast<int>(std::lround(width * fraction)));
  const int rh = std::max(1, static_cast<int>(std::lround(height * fraction)));
  Rect r;
  r.x0 = (width - rw) / 2;
  r.y0 = (height - rh) / 2;
  r.x1 = r.x0 + rw;
  r.y1 = r.y0 + rh;
  return r;
}

Yuv420Frame render_camera(const DroneState& state, const SceneConfig& scene,
                          int width, int height, uint64_t capture_ts_us,
                          uint32_t seq) {
  if (width < 16 || height < 16 || width % 2 != 0 || height % 2 != 0) {
    throw std::invalid_argument("render_camera: width/height must be even and >= 16");
  }

  Yuv420Frame frame;
  frame.width = width;
  frame.height = height;
  frame.capture_ts_us = capture_ts_us;
  frame.seq = seq;
  frame.y.resize(static_cast<size_t>(width) * height);
  frame.u.assign(static_cast<size_t>(width / 2) * (height / 2), scene.u_fill);
  frame.v.assign(static_cast<size_t>(width / 2) * (height / 2), scene.v_fill);

  const Rect target = central_region(width, height, scene.target_fraction);
  const uint8_t target_luma =
      scene.target_color == TargetColor::kWhite ? kLumaWhite : kLumaBlack;

  // One gradient period across the image, phase-shifted by yaw so telemetry
  // and imagery can be cross-checked.
  const double phase = state.yaw_deg / 360.0;
  std::vector<uint8_t> gradient_row(width);
  for (int x = 0; x < width; ++x) {
    double v = static_cast<double>(x) / width + phase;
    v -= std::floor(v);
    gradient_row[x] = static_cast<uint8_t>(16 + std::lround(v * 203.0));
  }

  for (int row = 0; row < height; ++row) {
    uint8_t* dst = frame.y.data() + static_cast<size_t>(row) * width;
    const bool in_target_rows = row >= target.y0 && row < target.y1;
    for (int x = 0; x < width; ++x) {
      const bool in_target = in_target_rows && x >= target.x0 && x < target.x1;
      dst[x] = in_target ? target_luma : gradient_row[x];
    }
  }
  return frame;
}

}  // namespace skybridge

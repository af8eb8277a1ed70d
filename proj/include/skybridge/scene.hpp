// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

#include "skybridge/drone.hpp"
#include "skybridge/frame.hpp"

namespace skybridge {

enum class TargetColor : uint8_t { kBlack = 0, kWhite = 1 };

const char* to_string(TargetColor color);

// Video-range (studio swing) luma extremes for the rendered target.
inline constexpr uint8_t kLumaBlack = 16;
inline constexpr uint8_t kLumaWhite = 235;

// Half-open pixel rectangle.
struct Rect {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;
};

// Centered region covering `fraction` of each axis (0 < fraction <= 1).
Rect central_region(int width, int height, double fraction);

// What the simulated camera sees: a black-or-white target panel in the
// image center over a yaw-encoding background gradient. The target color is
// externally settable (harness/target topic).
struct SceneConfig {
  TargetColor target_color = TargetColor::kWhite;
  double target_fraction = 0.5;  // central 50% x 50% by default
  // Deliberately non-neutral chroma so downstream discard is observable.
  uint8_t u_fill = 90;
  uint8_t v_fill = 240;
};

// Renders one camera frame. Y: target region uniform 235/16 per the scene
// color, background a horizontal gradient phase-shifted by yaw. U/V planes
// carry the configured non-neutral fill. width/height must be even and
// >= 16 (throws std::invalid_argument otherwise).
Yuv420Frame render_camera(const DroneState& state, const SceneConfig& scene,
                          int width, int height, uint64_t capture_ts_us,
                          uint32_t seq);

}  // namespace skybridge

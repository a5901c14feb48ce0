// Copyright 2026 The pickcell Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <optional>
#include <vector>

#include "common/png_io.hpp"
#include "perception/detection.hpp"
#include "perception/grasp.hpp"

namespace pickcell::perception {

/// Full-frame grasp to draw: center, closing axis and the jaw spread in pixels.
struct OverlayGrasp {
  double u = 0;
  double v = 0;
  double theta = 0;
  double opening_px = 0;
};

/// Depth colormap with detection boxes (selected one highlighted) and the
/// grasp axis drawn in cyan.
ImageRgb render_overlay(const DepthFrame& depth, const std::vector<Detection>& detections,
                        std::optional<std::size_t> selected, std::optional<OverlayGrasp> grasp);

}  // namespace pickcell::perception

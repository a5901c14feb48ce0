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

#include "perception/overlay.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pickcell::perception {
namespace {

void draw_line(ImageRgb& img, double u0, double v0, double u1, double v1, std::uint8_t r, std::uint8_t g,
               std::uint8_t b) {
  const int n = static_cast<int>(std::ceil(std::max(std::abs(u1 - u0), std::abs(v1 - v0)))) + 1;
  for (int i = 0; i <= n; ++i) {
    const double t = static_cast<double>(i) / n;
    img.put(static_cast<int>(std::lround(u0 + t * (u1 - u0))), static_cast<int>(std::lround(v0 + t * (v1 - v0))), r, g,
            b);
  }
}

void draw_box(ImageRgb& img, const BoundingBox& box, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  const double u0 = box.u_min, v0 = box.v_min, u1 = box.u_max - 1, v1 = box.v_max - 1;
  draw_line(img, u0, v0, u1, v0, r, g, b);
  draw_line(img, u1, v0, u1, v1, r, g, b);
  draw_line(img, u1, v1, u0, v1, r, g, b);
  draw_line(img, u0, v1, u0, v0, r, g, b);
}

}  // namespace

ImageRgb render_overlay(const DepthFrame& depth, const std::vector<Detection>& detections,
                        std::optional<std::size_t> selected, std::optional<OverlayGrasp> grasp) {
  ImageRgb img{depth.width(), depth.height(),
               std::vector<std::uint8_t>(static_cast<std::size_t>(depth.width()) * depth.height() * 3, 0)};
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (int v = 0; v < depth.height(); ++v)
    for (int u = 0; u < depth.width(); ++u)
      if (depth.valid(u, v)) lo = std::min(lo, depth.value(u, v)), hi = std::max(hi, depth.value(u, v));
  const double span = (hi > lo) ? hi - lo : 1.0;
  for (int v = 0; v < depth.height(); ++v)
    for (int u = 0; u < depth.width(); ++u) {
      if (!depth.valid(u, v)) {
        img.put(u, v, 90, 0, 90);  // holes in magenta
        continue;
      }
      // Near surfaces bright, far surfaces dark.
      const auto g = static_cast<std::uint8_t>(std::lround(230.0 * (hi - depth.value(u, v)) / span + 25.0));
      img.put(u, v, g, g, g);
    }
  for (std::size_t i = 0; i < detections.size(); ++i) {
    if (selected && *selected == i) continue;
    draw_box(img, detections[i].box, 0, 200, 0);
  }
  if (selected && *selected < detections.size()) draw_box(img, detections[*selected].box, 255, 220, 0);
  if (grasp) {
    const double h = grasp->opening_px / 2, dx = std::cos(grasp->theta), dy = std::sin(grasp->theta);
    draw_line(img, grasp->u - h * dx, grasp->v - h * dy, grasp->u + h * dx, grasp->v + h * dy, 0, 255, 255);
    for (int s : {-1, 1}) {
      const double eu = grasp->u + s * h * dx, ev = grasp->v + s * h * dy;
      draw_line(img, eu - 4 * dy, ev + 4 * dx, eu + 4 * dy, ev - 4 * dx, 0, 255, 255);
    }
  }
  return img;
}

}  // namespace pickcell::perception

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

#include <limits>
#include <algorithm>
#include "perception/depth_ops.hpp"

#include <cmath>

#include "common/error.hpp"

namespace pickcell::perception {

DepthFrame preprocess_depth(const DepthFrame& raw, const PixelRect& roi, int out_width, int out_height) {
  if (roi.width <= 0 || roi.height <= 0 || roi.u0 < 0 || roi.v0 < 0 || roi.u0 + roi.width > raw.width() ||
      roi.v0 + roi.height > raw.height())
    fail(ErrorCode::BadRoi, "roi outside the frame or empty");
  if (out_width <= 0 || out_height <= 0) fail(ErrorCode::BadRoi, "output size must be positive");

  DepthFrame out(out_width, out_height, 0.0, raw.intrinsics_ref());
  for (int v = 0; v < out_height; ++v) {
    const int sv = roi.v0 + std::min(roi.height - 1, static_cast<int>((v + 0.5) * roi.height / out_height));
    for (int u = 0; u < out_width; ++u) {
      const int su = roi.u0 + std::min(roi.width - 1, static_cast<int>((u + 0.5) * roi.width / out_width));
      if (raw.valid(su, sv))
        out.set(u, v, raw.value(su, sv));
      else
        out.set_hole(u, v);
    }
  }
  return out;
}

DepthFrame inpaint(const DepthFrame& depth) {
  if (depth.hole_count() == depth.mask().size()) fail(ErrorCode::AllHoles, "frame has no valid pixel");
  DepthFrame out = depth;
  struct Fill {
    int u, v;
    double value;
  };
  std::vector<Fill> pass;
  while (out.hole_count() > 0) {
    pass.clear();
    for (int v = 0; v < out.height(); ++v)
      for (int u = 0; u < out.width(); ++u) {
        if (out.valid(u, v)) continue;
        double sum = 0, lo = std::numeric_limits<double>::infinity(), hi = -lo;
        int n = 0;
        for (int dv = -1; dv <= 1; ++dv)
          for (int du = -1; du <= 1; ++du) {
            if (du == 0 && dv == 0) continue;
            const int uu = u + du, vv = v + dv;
            if (out.in_bounds(uu, vv) && out.valid(uu, vv)) {
              const double x = out.value(uu, vv);
              sum += x;
              lo = std::min(lo, x);
              hi = std::max(hi, x);
              ++n;
            }
          }
        if (n > 0) pass.push_back({u, v, std::clamp(sum / n, lo, hi)});
      }
    for (const Fill& f : pass) out.set(f.u, f.v, f.value);
  }
  return out;
}

std::pair<int, int> CropTransform::full_pixel_to_crop_pixel(int u, int v) const {
  return {static_cast<int>(std::floor(to_crop_u(u + 0.5))), static_cast<int>(std::floor(to_crop_v(v + 0.5)))};
}

std::pair<int, int> CropTransform::crop_pixel_to_full_pixel(int cu, int cv) const {
  return {static_cast<int>(std::floor(to_full_u(cu + 0.5))), static_cast<int>(std::floor(to_full_v(cv + 0.5)))};
}

CameraIntrinsics CropTransform::crop_intrinsics(const CameraIntrinsics& full, int out_width, int out_height) const {
  CameraIntrinsics c = full;
  c.fx = full.fx * sx;
  c.fy = full.fy * sy;
  c.cx = sx * (full.cx + 0.5 - u0) - 0.5;
  c.cy = sy * (full.cy + 0.5 - v0) - 0.5;
  c.width = out_width;
  c.height = out_height;
  c.id = full.id + "/crop";
  return c;
}

Crop crop_to_box(const DepthFrame& depth, const BoundingBox& box, int out_width, int out_height, int pad) {
  const double W = depth.width(), H = depth.height();
  if (!box.valid() || box.u_min < 0 || box.v_min < 0 || box.u_max > W || box.v_max > H)
    fail(ErrorCode::BadBox, "box outside the frame or degenerate");
  if (out_width <= 0 || out_height <= 0 || pad < 0) fail(ErrorCode::BadBox, "bad crop size or pad");

  double u0 = box.u_min - pad, u1 = box.u_max + pad;
  double v0 = box.v_min - pad, v1 = box.v_max + pad;
  const double side = std::max(u1 - u0, v1 - v0);
  if (side <= W && side <= H) {
    // Square window about the box center, shifted back inside the frame.
    const double cu = 0.5 * (box.u_min + box.u_max), cv = 0.5 * (box.v_min + box.v_max);
    u0 = std::clamp(cu - side / 2, 0.0, W - side);
    v0 = std::clamp(cv - side / 2, 0.0, H - side);
    u1 = u0 + side;
    v1 = v0 + side;
  } else {
    u0 = std::max(0.0, u0), v0 = std::max(0.0, v0);
    u1 = std::min(W, u1), v1 = std::min(H, v1);
  }

  Crop crop;
  crop.window_width = u1 - u0;
  crop.window_height = v1 - v0;
  crop.transform = {u0, v0, out_width / crop.window_width, out_height / crop.window_height};
  crop.depth = DepthFrame(out_width, out_height, 0.0, depth.intrinsics_ref());
  for (int cv = 0; cv < out_height; ++cv)
    for (int cu = 0; cu < out_width; ++cu) {
      auto [su, sv] = crop.transform.crop_pixel_to_full_pixel(cu, cv);
      su = std::clamp(su, 0, depth.width() - 1);
      sv = std::clamp(sv, 0, depth.height() - 1);
      if (depth.valid(su, sv))
        crop.depth.set(cu, cv, depth.value(su, sv));
      else
        crop.depth.set_hole(cu, cv);
    }
  return crop;
}

}  // namespace pickcell::perception

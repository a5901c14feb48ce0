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

#include "common/types.hpp"

namespace pickcell::perception {

struct PixelRect {
  int u0 = 0;
  int v0 = 0;
  int width = 0;
  int height = 0;
};

/// Crop to `roi`, then nearest-neighbor resample to out_width x out_height.
/// The hole mask follows the same mapping.
DepthFrame preprocess_depth(const DepthFrame& raw, const PixelRect& roi, int out_width, int out_height);

/// Boundary diffusion: each pass fills every hole that has at least one valid
/// 8-neighbor with the mean of those neighbors, all from the previous pass.
DepthFrame inpaint(const DepthFrame& depth);

/// Maps between full-frame and crop coordinates. Continuous coordinates use
/// pixel-edge convention (pixel i spans [i, i + 1)).
struct CropTransform {
  double u0 = 0;
  double v0 = 0;
  double sx = 1;
  double sy = 1;

  double to_crop_u(double x) const { return (x - u0) * sx; }
  double to_crop_v(double y) const { return (y - v0) * sy; }
  double to_full_u(double x) const { return u0 + x / sx; }
  double to_full_v(double y) const { return v0 + y / sy; }

  /// Full-frame pixel index (pixel-center convention) of a crop pixel center.
  std::pair<double, double> crop_pixel_to_full(double cu, double cv) const {
    return {to_full_u(cu + 0.5) - 0.5, to_full_v(cv + 0.5) - 0.5};
  }
  std::pair<int, int> full_pixel_to_crop_pixel(int u, int v) const;
  std::pair<int, int> crop_pixel_to_full_pixel(int cu, int cv) const;

  BoundingBox to_crop(const BoundingBox& b) const {
    return {to_crop_u(b.u_min), to_crop_v(b.v_min), to_crop_u(b.u_max), to_crop_v(b.v_max)};
  }
  /// Intrinsics under which the crop is an ordinary pinhole image.
  CameraIntrinsics crop_intrinsics(const CameraIntrinsics& full, int out_width, int out_height) const;
};

struct Crop {
  DepthFrame depth;
  CropTransform transform;
  double window_width = 0;
  double window_height = 0;
};

/// Box grown by `pad` on every side, squared about its center and shifted to
/// stay inside the frame, then scaled to the output size.
Crop crop_to_box(const DepthFrame& depth, const BoundingBox& box, int out_width, int out_height, int pad);

}  // namespace pickcell::perception

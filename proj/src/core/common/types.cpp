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

#include "common/types.hpp"

#include <numeric>

#include "common/error.hpp"

namespace pickcell {

void CameraIntrinsics::validate() const {
  if (!(fx > 0 && fy > 0)) fail(ErrorCode::ValidationError, "focal lengths must be positive");
  if (width <= 0 || height <= 0) fail(ErrorCode::ValidationError, "image size must be positive");
  if (!(cx >= 0 && cx < width && cy >= 0 && cy < height))
    fail(ErrorCode::ValidationError, "principal point outside the image");
}

void GripperParams::validate() const {
  if (!(max_opening > 0 && jaw_thickness > 0 && jaw_width > 0 && insertion_depth > 0))
    fail(ErrorCode::ValidationError, "gripper dimensions must be positive");
  if (!(max_opening > 2 * jaw_thickness))
    fail(ErrorCode::ValidationError, "max_opening must exceed twice the jaw thickness");
}

DepthFrame::DepthFrame(int width, int height, double fill, std::string intrinsics_ref)
    : width_(width),
      height_(height),
      data_(static_cast<std::size_t>(std::max(0, width)) * static_cast<std::size_t>(std::max(0, height)), fill),
      mask_(data_.size(), 1),
      intrinsics_ref_(std::move(intrinsics_ref)) {
  if (width < 0 || height < 0) fail(ErrorCode::InvalidArgument, "negative frame size");
}

std::size_t DepthFrame::hole_count() const {
  return static_cast<std::size_t>(std::count(mask_.begin(), mask_.end(), std::uint8_t{0}));
}

}  // namespace pickcell

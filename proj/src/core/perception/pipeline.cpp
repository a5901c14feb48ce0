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

#include "perception/pipeline.hpp"

#include <cmath>
#include <numbers>

#include "common/error.hpp"

namespace pickcell::perception {

void PerceptionParams::validate() const {
  if (crop_size < 8) fail(ErrorCode::ValidationError, "crop_size must be >= 8");
  if (crop_pad < 0) fail(ErrorCode::ValidationError, "crop_pad must be non-negative");
  grasp.validate();
}

FrameAnalysis analyze_frame(const DepthFrame& raw, const std::vector<sim::GroundTruth>& gt,
                            const DetectorParams& detector, std::uint64_t frame_seed) {
  FrameAnalysis out;
  out.raw = preprocess_depth(raw, {0, 0, raw.width(), raw.height()}, raw.width(), raw.height());
  out.filled = inpaint(out.raw);
  out.detections = detect(gt, detector, frame_seed, raw.width(), raw.height());
  return out;
}

std::optional<PlannedGrasp> plan_for_detection(const FrameAnalysis& frame, std::size_t index,
                                               const GripperParams& gripper, const CameraIntrinsics& cam,
                                               const PerceptionParams& params) {
  const Detection& det = frame.detections.at(index);
  const Crop crop = crop_to_box(frame.filled, det.box, params.crop_size, params.crop_size, params.crop_pad);
  const CameraIntrinsics crop_cam = crop.transform.crop_intrinsics(cam, params.crop_size, params.crop_size);
  GraspMap map;
  try {
    map = plan_grasp(crop.depth, crop.transform.to_crop(det.box), gripper, crop_cam, params.grasp.stride,
                     params.grasp.angular_bins, params.grasp);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NoFeasibleGrasp) return std::nullopt;
    throw;
  }

  PlannedGrasp g;
  g.detection_index = index;
  g.crop_grasp = map.best;
  g.transform = crop.transform;
  auto [u, v] = crop.transform.crop_pixel_to_full(map.best.u, map.best.v);
  g.u = u;
  g.v = v;
  double theta = std::atan2(std::sin(map.best.theta) / crop.transform.sy, std::cos(map.best.theta) / crop.transform.sx);
  if (theta < 0) theta += std::numbers::pi;
  if (theta >= std::numbers::pi) theta -= std::numbers::pi;
  g.theta = theta;
  g.z = map.best.z;
  g.quality = map.best.quality;
  auto [fu, fv] = crop.transform.crop_pixel_to_full_pixel(static_cast<int>(map.best.u), static_cast<int>(map.best.v));
  g.on_filled_hole = frame.raw.in_bounds(fu, fv) && !frame.raw.valid(fu, fv);
  return g;
}

}  // namespace pickcell::perception

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

#include "perception/depth_ops.hpp"
#include "perception/detection.hpp"
#include "perception/grasp.hpp"

namespace pickcell::perception {

struct PerceptionParams {
  int crop_size = 96;
  int crop_pad = 8;
  GraspParams grasp;

  void validate() const;
  bool operator==(const PerceptionParams&) const = default;
};

/// Output of the frame-level stages: preprocessing, inpainting and detection.
struct FrameAnalysis {
  DepthFrame raw;
  DepthFrame filled;
  std::vector<Detection> detections;
};

FrameAnalysis analyze_frame(const DepthFrame& raw, const std::vector<sim::GroundTruth>& gt,
                            const DetectorParams& detector, std::uint64_t frame_seed);

/// A planned grasp mapped back to full-frame pixels.
struct PlannedGrasp {
  std::size_t detection_index = 0;
  double u = 0;      // full-frame pixel, center convention
  double v = 0;
  double theta = 0;  // [0, pi) in full-frame pixel axes
  double z = 0;
  double quality = 0;
  bool on_filled_hole = false;  // center sat on a hole of the raw frame
  GraspCandidate crop_grasp;
  CropTransform transform;
};

/// Crop around detection `index`, plan, and map back. Empty when the crop
/// holds no feasible grasp.
std::optional<PlannedGrasp> plan_for_detection(const FrameAnalysis& frame, std::size_t index,
                                               const GripperParams& gripper, const CameraIntrinsics& cam,
                                               const PerceptionParams& params);

}  // namespace pickcell::perception

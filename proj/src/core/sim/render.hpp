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

#include <cstdint>
#include <vector>

#include "common/types.hpp"
#include "sim/scene.hpp"

namespace pickcell::sim {

struct NoiseParams {
  double sigma_base = 0.0015;
  int grid_pitch = 8;
  double hole_rate = 0.01;
  int hole_blob_radius = 2;
  double edge_hole_boost = 8.0;

  void validate() const;
  static NoiseParams none() { return {0.0, 1, 0.0, 0, 0.0}; }
  bool operator==(const NoiseParams&) const = default;
};

struct NoiseField {
  int width = 0;
  int height = 0;
  std::vector<double> values;  // row-major, meters

  double at(int u, int v) const { return values[static_cast<std::size_t>(v) * width + u]; }
};

/// Correlated Gaussian field: i.i.d. N(0, sigma_base) on a coarse lattice of
/// spacing grid_pitch, bilinearly upsampled to w x h.
NoiseField sample_gp_noise(std::uint64_t seed, int width, int height, const NoiseParams& params);

/// Noiseless depth plus, per pixel, the index of the visible object (-1 for floor).
struct CleanRender {
  DepthFrame depth;
  std::vector<int> labels;
};

CleanRender render_clean(const Scene& scene, const CameraIntrinsics& cam, const CameraPose& pose);

DepthFrame render_depth(const Scene& scene, const CameraIntrinsics& cam, const CameraPose& pose,
                        const NoiseParams& noise, std::uint64_t seed);

struct GroundTruth {
  int object_id = 0;
  std::string class_label;
  BoundingBox box;
  double occlusion = 0;
  bool degenerate = false;
};

std::vector<GroundTruth> render_ground_truth(const Scene& scene, const CameraIntrinsics& cam,
                                             const CameraPose& pose = {});

}  // namespace pickcell::sim

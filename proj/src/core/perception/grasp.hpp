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

#include <vector>

#include "common/canonical_json.hpp"
#include "common/types.hpp"

namespace pickcell::perception {

struct GraspParams {
  double edge_threshold = 0.008;  // depth rise marking a contact edge, meters
  double margin = 0.05;           // fraction of the opening kept free
  double friction_coef = 0.5;     // contacts outside the friction cone score 0
  int stride = 4;
  int angular_bins = 16;

  void validate() const;
  bool operator==(const GraspParams&) const = default;
};

struct GraspCandidate {
  double u = 0;
  double v = 0;
  double theta = 0;  // [0, pi), undirected closing axis in image coordinates
  double z = 0;      // depth at the grasp center
  double quality = 0;

  bool operator==(const GraspCandidate&) const = default;
};

/// Factors of the antipodal quality metric for one (u, v, theta).
struct GraspEvaluation {
  double quality = 0;
  double w_fit = 0;
  double w_align = 0;
  double w_clear = 0;
  double z = 0;
  double opening_px = 0;
  int left_edge = -1;   // steps along -axis to the contact edge, -1 if none
  int right_edge = -1;  // steps along +axis
};

GraspEvaluation evaluate_grasp(const DepthFrame& depth, int u, int v, double theta, const GripperParams& gripper,
                               const CameraIntrinsics& cam, const GraspParams& params = {});

double grasp_quality(const DepthFrame& depth, int u, int v, double theta, const GripperParams& gripper,
                     const CameraIntrinsics& cam, const GraspParams& params = {});

/// Dense quality tensor over grasp centers (row, col) and K planar angles.
struct GraspMap {
  int stride = 1;
  int angular_bins = 1;
  int rows = 0;
  int cols = 0;
  std::vector<double> q;  // index ((row * cols) + col) * K + k
  GraspCandidate best;

  double at(int row, int col, int k) const {
    return q[(static_cast<std::size_t>(row) * cols + col) * angular_bins + k];
  }
  int center_u(int col) const { return col * stride + stride / 2; }
  int center_v(int row) const { return row * stride + stride / 2; }
  double theta(int k) const;

  Json to_json() const;
};

/// Evaluates the full grid, then picks the best grasp whose center lies in
/// `box` (crop coordinates). Ties go to the lower linear index.
GraspMap evaluate_grasp_map(const DepthFrame& crop, const GripperParams& gripper, const CameraIntrinsics& cam,
                            int stride, int angular_bins, const GraspParams& params = {});
GraspMap plan_grasp(const DepthFrame& crop, const BoundingBox& box, const GripperParams& gripper,
                    const CameraIntrinsics& cam, int stride, int angular_bins, const GraspParams& params = {});

}  // namespace pickcell::perception

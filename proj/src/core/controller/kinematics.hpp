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

#include <Eigen/Geometry>

#include "common/types.hpp"

namespace pickcell::controller {

/// Camera-frame point for pixel (u, v) at depth z. Throws BadDepth for z <= 0.
Vec3 deproject(double u, double v, double z, const CameraIntrinsics& cam);

/// Rigid camera -> robot transform, p_robot = R * p_cam + t.
struct Extrinsics {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Vec3 translation = Vec3::Zero();

  /// Overhead camera over the bin with robot frame = bin frame.
  static Extrinsics from_pose(const CameraPose& pose);
  void validate() const;
  Eigen::Isometry3d isometry() const;
  /// this * other: apply `other` first.
  Extrinsics compose(const Extrinsics& other) const;
  bool operator==(const Extrinsics&) const = default;
};

Vec3 to_robot_frame(const Vec3& p_cam, const Extrinsics& e);
/// Planar angle of a camera-frame axis direction after rotation into the robot frame.
double to_robot_yaw(double theta_cam, const Extrinsics& e);

struct MotionProfile {
  double max_speed = 0.17;       // m/s
  double accel = 0.4;            // m/s^2
  double grip_close_s = 1.0;
  double grip_open_s = 0.8;
  double settle_s = 0.5;         // dwell after arriving over a grasp
  double approach_height = 0.15; // vertical approach and retreat, meters

  void validate() const;
  bool operator==(const MotionProfile&) const = default;
};

/// Trapezoidal point-to-point time over the Euclidean distance.
double motion_time(const Vec3& from, const Vec3& to, const MotionProfile& prof);
double motion_time(double distance, const MotionProfile& prof);

}  // namespace pickcell::controller

namespace pickcell::controller {

/// Travel to a point `approach_height` above the target, descend, settle.
double grasp_move_time(const Vec3& from, const Vec3& target, const MotionProfile& prof);
/// Lift by `approach_height`, then travel to the drop point.
double place_move_time(const Vec3& from, const Vec3& place, const MotionProfile& prof);

}  // namespace pickcell::controller

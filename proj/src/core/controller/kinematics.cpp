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

#include "controller/kinematics.hpp"

#include <cmath>

#include "common/error.hpp"

namespace pickcell::controller {

Vec3 deproject(double u, double v, double z, const CameraIntrinsics& cam) {
  if (!(z > 0)) fail(ErrorCode::BadDepth, "depth must be positive, got " + std::to_string(z));
  return pinhole_deproject(u, v, z, cam);
}

Extrinsics Extrinsics::from_pose(const CameraPose& pose) {
  const Eigen::Isometry3d t = camera_to_bin(pose);
  return {t.linear(), t.translation()};
}

void Extrinsics::validate() const {
  if (!rotation.allFinite() || !translation.allFinite())
    fail(ErrorCode::ValidationError, "extrinsics must be finite");
  if ((rotation.transpose() * rotation - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > 1e-9)
    fail(ErrorCode::ValidationError, "extrinsic rotation is not orthonormal");
  if (std::abs(rotation.determinant() - 1.0) > 1e-9)
    fail(ErrorCode::ValidationError, "extrinsic rotation must have determinant +1");
}

Eigen::Isometry3d Extrinsics::isometry() const {
  Eigen::Isometry3d t = Eigen::Isometry3d::Identity();
  t.linear() = rotation;
  t.translation() = translation;
  return t;
}

Extrinsics Extrinsics::compose(const Extrinsics& other) const {
  return {rotation * other.rotation, rotation * other.translation + translation};
}

Vec3 to_robot_frame(const Vec3& p_cam, const Extrinsics& e) { return e.rotation * p_cam + e.translation; }

double to_robot_yaw(double theta_cam, const Extrinsics& e) {
  const Vec3 d = e.rotation * Vec3(std::cos(theta_cam), std::sin(theta_cam), 0.0);
  return std::atan2(d.y(), d.x());
}

void MotionProfile::validate() const {
  if (!(max_speed > 0) || !(accel > 0)) fail(ErrorCode::ValidationError, "motion speed and accel must be positive");
  if (!(grip_close_s > 0) || !(grip_open_s > 0) || !(settle_s > 0))
    fail(ErrorCode::ValidationError, "gripper and settle times must be positive");
  if (!(approach_height >= 0)) fail(ErrorCode::ValidationError, "approach_height must be non-negative");
}

double motion_time(double d, const MotionProfile& prof) {
  if (d <= 0) return 0.0;
  const double v = prof.max_speed, a = prof.accel;
  if (d >= v * v / a) return d / v + v / a;
  return 2.0 * std::sqrt(d / a);
}

double motion_time(const Vec3& from, const Vec3& to, const MotionProfile& prof) {
  return motion_time((to - from).norm(), prof);
}

}  // namespace pickcell::controller

namespace pickcell::controller {

double grasp_move_time(const Vec3& from, const Vec3& target, const MotionProfile& prof) {
  const Vec3 above = target + Vec3(0, 0, prof.approach_height);
  return motion_time(from, above, prof) + motion_time(above, target, prof) + prof.settle_s;
}

double place_move_time(const Vec3& from, const Vec3& place, const MotionProfile& prof) {
  const Vec3 lifted = from + Vec3(0, 0, prof.approach_height);
  return motion_time(from, lifted, prof) + motion_time(lifted, place, prof);
}

}  // namespace pickcell::controller

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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Geometry>

namespace pickcell {

/// Requested objects: class label -> remaining count.
using ClassCounts = std::map<std::string, int>;

using Vec3 = Eigen::Vector3d;

/// Pinhole intrinsics. Pixel (i, j) has its center at u = i, v = j.
struct CameraIntrinsics {
  double fx = 400.0;
  double fy = 400.0;
  double cx = 159.5;
  double cy = 119.5;
  int width = 320;
  int height = 240;
  std::string id = "overhead";

  void validate() const;
  bool operator==(const CameraIntrinsics&) const = default;
};

/// Overhead capture pose in the bin frame: optical axis points straight down,
/// image u runs along +x and image v along -y.
struct CameraPose {
  double x = 0.225;
  double y = 0.125;
  double height = 0.70;

  bool operator==(const CameraPose&) const = default;
};

/// Camera-frame point for pixel (u, v) at depth z.
inline Vec3 pinhole_deproject(double u, double v, double z, const CameraIntrinsics& cam) {
  return {(u - cam.cx) * z / cam.fx, (v - cam.cy) * z / cam.fy, z};
}

inline std::pair<double, double> pinhole_project(const Vec3& p, const CameraIntrinsics& cam) {
  return {cam.fx * p.x() / p.z() + cam.cx, cam.fy * p.y() / p.z() + cam.cy};
}

inline Eigen::Isometry3d camera_to_bin(const CameraPose& pose) {
  Eigen::Isometry3d t = Eigen::Isometry3d::Identity();
  t.linear() = Eigen::Vector3d(1.0, -1.0, -1.0).asDiagonal();
  t.translation() = Vec3(pose.x, pose.y, pose.height);
  return t;
}

/// Axis-aligned pixel rectangle in continuous coordinates: pixel i spans
/// [i, i + 1), so a box (0, 0, 10, 10) covers exactly 10x10 pixels.
struct BoundingBox {
  double u_min = 0;
  double v_min = 0;
  double u_max = 0;
  double v_max = 0;

  double width() const { return u_max - u_min; }
  double height() const { return v_max - v_min; }
  double area() const { return std::max(0.0, width()) * std::max(0.0, height()); }
  bool valid() const { return u_min < u_max && v_min < v_max; }
  /// True when the center of pixel (u, v) lies inside the box.
  bool contains_pixel(int u, int v) const {
    const double pu = u + 0.5;
    const double pv = v + 0.5;
    return pu >= u_min && pu < u_max && pv >= v_min && pv < v_max;
  }
  bool operator==(const BoundingBox&) const = default;
};

inline double intersection_area(const BoundingBox& a, const BoundingBox& b) {
  const double w = std::min(a.u_max, b.u_max) - std::max(a.u_min, b.u_min);
  const double h = std::min(a.v_max, b.v_max) - std::max(a.v_min, b.v_min);
  return (w > 0 && h > 0) ? w * h : 0.0;
}

inline double iou(const BoundingBox& a, const BoundingBox& b) {
  const double inter = intersection_area(a, b);
  const double uni = a.area() + b.area() - inter;
  return uni > 0 ? inter / uni : 0.0;
}

inline BoundingBox union_box(const BoundingBox& a, const BoundingBox& b) {
  return {std::min(a.u_min, b.u_min), std::min(a.v_min, b.v_min),
          std::max(a.u_max, b.u_max), std::max(a.v_max, b.v_max)};
}

/// Parallel-jaw gripper geometry (Robotiq 2F-85 defaults).
struct GripperParams {
  double max_opening = 0.085;
  double jaw_thickness = 0.010;
  double jaw_width = 0.022;
  double insertion_depth = 0.015;

  void validate() const;
  bool operator==(const GripperParams&) const = default;
};

/// Row-major depth image in meters with a validity mask. Holes store 0.0.
class DepthFrame {
 public:
  static constexpr double kHole = 0.0;

  DepthFrame() = default;
  DepthFrame(int width, int height, double fill, std::string intrinsics_ref = {});

  int width() const { return width_; }
  int height() const { return height_; }
  const std::string& intrinsics_ref() const { return intrinsics_ref_; }
  void set_intrinsics_ref(std::string ref) { intrinsics_ref_ = std::move(ref); }

  bool in_bounds(int u, int v) const { return u >= 0 && v >= 0 && u < width_ && v < height_; }
  bool valid(int u, int v) const { return mask_[index(u, v)] != 0; }
  /// Raw stored value; the hole sentinel for invalid pixels.
  double value(int u, int v) const { return data_[index(u, v)]; }
  std::optional<double> depth(int u, int v) const {
    if (!valid(u, v)) return std::nullopt;
    return data_[index(u, v)];
  }

  void set(int u, int v, double d) {
    data_[index(u, v)] = d;
    mask_[index(u, v)] = 1;
  }
  void set_hole(int u, int v) {
    data_[index(u, v)] = kHole;
    mask_[index(u, v)] = 0;
  }

  std::span<const double> data() const { return data_; }
  std::span<const std::uint8_t> mask() const { return mask_; }
  std::size_t hole_count() const;

  bool operator==(const DepthFrame&) const = default;

 private:
  std::size_t index(int u, int v) const {
    return static_cast<std::size_t>(v) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(u);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<double> data_;
  std::vector<std::uint8_t> mask_;
  std::string intrinsics_ref_;
};

}  // namespace pickcell

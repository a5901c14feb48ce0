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

#include "perception/grasp.hpp"

#include <cmath>
#include <numbers>

#include "common/error.hpp"

namespace pickcell::perception {
namespace {

constexpr double kPi = std::numbers::pi;

// Sobel gradient of depth with edge clamping.
std::pair<double, double> sobel(const DepthFrame& d, int u, int v) {
  auto at = [&](int uu, int vv) {
    uu = std::clamp(uu, 0, d.width() - 1);
    vv = std::clamp(vv, 0, d.height() - 1);
    return d.value(uu, vv);
  };
  const double gx = (at(u + 1, v - 1) + 2 * at(u + 1, v) + at(u + 1, v + 1)) -
                    (at(u - 1, v - 1) + 2 * at(u - 1, v) + at(u - 1, v + 1));
  const double gy = (at(u - 1, v + 1) + 2 * at(u, v + 1) + at(u + 1, v + 1)) -
                    (at(u - 1, v - 1) + 2 * at(u, v - 1) + at(u + 1, v - 1));
  return {gx, gy};
}

struct Edge {
  int steps = -1;
  int u = 0;
  int v = 0;
};

Edge march(const DepthFrame& d, int u, int v, double dx, double dy, double z, double threshold, int max_steps) {
  for (int t = 1; t <= max_steps; ++t) {
    const int pu = static_cast<int>(std::lround(u + t * dx));
    const int pv = static_cast<int>(std::lround(v + t * dy));
    if (!d.in_bounds(pu, pv)) return {};
    if (d.valid(pu, pv) && d.value(pu, pv) > z + threshold) return {t, pu, pv};
  }
  return {};
}

}  // namespace

void GraspParams::validate() const {
  if (edge_threshold <= 0) fail(ErrorCode::ValidationError, "edge_threshold must be positive");
  if (margin < 0 || margin >= 1) fail(ErrorCode::ValidationError, "margin must lie in [0, 1)");
  if (friction_coef <= 0) fail(ErrorCode::ValidationError, "friction_coef must be positive");
  if (stride < 1 || angular_bins < 1) fail(ErrorCode::ValidationError, "stride and angular_bins must be >= 1");
}

GraspEvaluation evaluate_grasp(const DepthFrame& depth, int u, int v, double theta, const GripperParams& gripper,
                               const CameraIntrinsics& cam, const GraspParams& params) {
  GraspEvaluation ev;
  if (!depth.in_bounds(u, v) || !depth.valid(u, v)) return ev;
  const double z = depth.value(u, v);
  if (!(z > 0)) return ev;
  ev.z = z;

  // The axis is undirected: fold theta into [0, pi) and snap to a 1e-9 rad
  // grid so theta and theta + pi walk exactly the same pixels.
  theta = std::round((theta - kPi * std::floor(theta / kPi)) * 1e9) / 1e9;
  if (theta >= kPi) theta = 0.0;
  const double dx = std::cos(theta), dy = std::sin(theta);

  const double px = cam.fx * gripper.max_opening / z;
  ev.opening_px = px;
  const int max_steps = static_cast<int>(std::floor(px / 2));
  const Edge right = march(depth, u, v, dx, dy, z, params.edge_threshold, max_steps);
  const Edge left = march(depth, u, v, -dx, -dy, z, params.edge_threshold, max_steps);
  ev.left_edge = left.steps;
  ev.right_edge = right.steps;
  if (left.steps < 0 || right.steps < 0) return ev;
  if (left.steps + right.steps > px * (1.0 - params.margin)) return ev;
  ev.w_fit = 1.0;

  auto unit_normal = [&](const Edge& e) -> std::pair<double, double> {
    auto [gx, gy] = sobel(depth, e.u, e.v);
    const double n = std::hypot(gx, gy);
    if (n < 1e-12) return {0.0, 0.0};
    return {gx / n, gy / n};
  };
  const auto [nlx, nly] = unit_normal(left);
  const auto [nrx, nry] = unit_normal(right);
  const double cl = -(nlx * dx + nly * dy), cr = nrx * dx + nry * dy;
  const double cone = 1.0 / std::sqrt(1.0 + params.friction_coef * params.friction_coef);
  ev.w_align = (cl >= cone && cr >= cone) ? cl * cr : 0.0;

  // Jaw landing zones: jaw_thickness deep along the axis beyond each edge,
  // jaw_width wide across it.
  const double thick_px = cam.fx * gripper.jaw_thickness / z;
  const double half_w_px = 0.5 * cam.fx * gripper.jaw_width / z;
  const double limit = z - gripper.insertion_depth;
  ev.w_clear = 1.0;
  for (int side : {-1, 1}) {
    const int edge = side > 0 ? right.steps : left.steps;
    for (double a = edge; a <= edge + thick_px && ev.w_clear > 0; a += 1.0)
      for (double b = -half_w_px; b <= half_w_px; b += 1.0) {
        const int pu = static_cast<int>(std::lround(u + side * a * dx - b * dy));
        const int pv = static_cast<int>(std::lround(v + side * a * dy + b * dx));
        if (!depth.in_bounds(pu, pv) || !depth.valid(pu, pv)) continue;
        if (depth.value(pu, pv) < limit) {
          ev.w_clear = 0.0;
          break;
        }
      }
  }
  ev.quality = std::clamp(ev.w_fit * ev.w_align * ev.w_clear, 0.0, 1.0);
  return ev;
}

double grasp_quality(const DepthFrame& depth, int u, int v, double theta, const GripperParams& gripper,
                     const CameraIntrinsics& cam, const GraspParams& params) {
  return evaluate_grasp(depth, u, v, theta, gripper, cam, params).quality;
}

double GraspMap::theta(int k) const { return k * kPi / angular_bins; }

Json GraspMap::to_json() const {
  return {{"stride", stride},
          {"angular_bins", angular_bins},
          {"rows", rows},
          {"cols", cols},
          {"q", q},
          {"best", {{"u", best.u}, {"v", best.v}, {"theta", best.theta}, {"z", best.z}, {"quality", best.quality}}}};
}

GraspMap evaluate_grasp_map(const DepthFrame& crop, const GripperParams& gripper, const CameraIntrinsics& cam,
                            int stride, int angular_bins, const GraspParams& params) {
  if (stride < 1 || angular_bins < 1) fail(ErrorCode::InvalidArgument, "stride and K must be >= 1");
  GraspMap map;
  map.stride = stride;
  map.angular_bins = angular_bins;
  map.rows = crop.height() / stride;
  map.cols = crop.width() / stride;
  map.q.assign(static_cast<std::size_t>(map.rows) * map.cols * angular_bins, 0.0);
  for (int r = 0; r < map.rows; ++r)
    for (int c = 0; c < map.cols; ++c)
      for (int k = 0; k < angular_bins; ++k)
        map.q[(static_cast<std::size_t>(r) * map.cols + c) * angular_bins + k] =
            grasp_quality(crop, map.center_u(c), map.center_v(r), map.theta(k), gripper, cam, params);
  return map;
}

GraspMap plan_grasp(const DepthFrame& crop, const BoundingBox& box, const GripperParams& gripper,
                    const CameraIntrinsics& cam, int stride, int angular_bins, const GraspParams& params) {
  GraspMap map = evaluate_grasp_map(crop, gripper, cam, stride, angular_bins, params);
  double best = 0;
  bool found = false;
  for (int r = 0; r < map.rows; ++r)
    for (int c = 0; c < map.cols; ++c) {
      if (!box.contains_pixel(map.center_u(c), map.center_v(r))) continue;
      for (int k = 0; k < angular_bins; ++k) {
        const double q = map.at(r, c, k);
        if (q > best) {
          best = q;
          found = true;
          const int u = map.center_u(c), v = map.center_v(r);
          map.best = {static_cast<double>(u), static_cast<double>(v), map.theta(k), crop.value(u, v), q};
        }
      }
    }
  if (!found) fail(ErrorCode::NoFeasibleGrasp, "no grasp with positive quality inside the box");
  return map;
}

}  // namespace pickcell::perception

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

#include "fixtures.hpp"

#include <cmath>
#include <numbers>

#include "common/error.hpp"

namespace pickcell::testing {

sim::Scene hammer_scene(bool walled) {
  sim::Scene s;
  s.objects.push_back(sim::place_object(0, sim::make_hammer(), {0.225, 0.125, std::numbers::pi}));
  if (walled) {
    // Handle spans world x in [0.213, 0.237] and world y in (0.070, 0.210].
    // Walls are wider than the gripper opening in every direction, so they
    // offer no grasp of their own.
    const auto wall = sim::make_box("block", 0.100, 0.130, 0.060);
    s.objects.push_back(sim::place_object(1, wall, {0.225 - 0.012 - 0.004 - 0.050, 0.150, 0.0}));
    s.objects.push_back(sim::place_object(2, wall, {0.225 + 0.012 + 0.004 + 0.050, 0.150, 0.0}));
  }
  return s;
}

bool over_handle(const sim::SceneObject& hammer, double x, double y) {
  const double dx = x - hammer.pose.x, dy = y - hammer.pose.y;
  const double c = std::cos(hammer.pose.yaw), s = std::sin(hammer.pose.yaw);
  const double lx = c * dx + s * dy, ly = -s * dx + c * dy;
  return std::abs(lx) <= 0.012 + 1e-9 && ly < 0.055 && ly >= -0.085;
}

std::pair<double, double> pixel_to_bin(double u, double v, double z) {
  const CameraIntrinsics cam;
  const CameraPose pose;
  const Vec3 p = camera_to_bin(pose) * pinhole_deproject(u, v, z, cam);
  return {p.x(), p.y()};
}

PlanResult plan_on_object(const sim::Scene& scene, int object_id) {
  const CameraIntrinsics cam;
  const CameraPose pose;
  perception::FrameAnalysis frame;
  frame.raw = sim::render_depth(scene, cam, pose, sim::NoiseParams::none(), 0);
  frame.filled = frame.raw;
  for (const auto& g : sim::render_ground_truth(scene, cam, pose))
    if (g.object_id == object_id) frame.detections.push_back({g.box, g.class_label, 1.0, {g.object_id}, false});
  if (frame.detections.empty()) fail(ErrorCode::InvalidArgument, "object not visible");
  auto g = perception::plan_for_detection(frame, 0, GripperParams{}, cam, perception::PerceptionParams{});
  if (!g) fail(ErrorCode::NoFeasibleGrasp, "no grasp on fixture object");
  PlanResult r{*g, 0, 0};
  std::tie(r.bin_x, r.bin_y) = pixel_to_bin(g->u, g->v, g->z);
  return r;
}

bool BulgeFixture::in_hole(double u, double v) const {
  const int pu = static_cast<int>(std::lround(u)), pv = static_cast<int>(std::lround(v));
  auto inside = [&](const perception::PixelRect& r) {
    return pu >= r.u0 && pu < r.u0 + r.width && pv >= r.v0 && pv < r.v0 + r.height;
  };
  return inside(hole) && !inside(peg);
}

BulgeFixture bulge_fixture(bool with_hole, bool with_peg) {
  const CameraIntrinsics cam;
  BulgeFixture f;
  f.raw = DepthFrame(cam.width, cam.height, 0.70, cam.id);
  f.plate_box = {124, 84, 196, 156};
  for (int v = 84; v < 156; ++v)
    for (int u = 124; u < 196; ++u) f.raw.set(u, v, 0.69);
  f.peg = {158, 118, 4, 4};
  f.hole = {148, 108, 24, 24};
  if (with_hole)
    for (int v = f.hole.v0; v < f.hole.v0 + f.hole.height; ++v)
      for (int u = f.hole.u0; u < f.hole.u0 + f.hole.width; ++u) f.raw.set_hole(u, v);
  if (with_peg)
    for (int v = f.peg.v0; v < f.peg.v0 + f.peg.height; ++v)
      for (int u = f.peg.u0; u < f.peg.u0 + f.peg.width; ++u) f.raw.set(u, v, 0.64);
  return f;
}

sim::Scene crossed_bananas() {
  const auto catalog = sim::default_catalog();
  const auto& banana = catalog[3];
  sim::Scene s;
  s.objects.push_back(sim::place_object(0, banana, {0.225, 0.125, 0.6}));
  s.objects.push_back(sim::place_object(1, banana, {0.225, 0.125, -0.6}));
  return s;
}

}  // namespace pickcell::testing

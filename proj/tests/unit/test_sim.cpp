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

#include <cmath>
#include <numbers>
#include <set>

#include "common/error.hpp"
#include "common/png_io.hpp"
#include "doctest.h"
#include "sim/render.hpp"
#include "sim/scene.hpp"

using namespace pickcell;
using namespace pickcell::sim;

namespace {

const CameraIntrinsics kCam;
const CameraPose kPose;

// Bin-frame point seen by pixel (u, v) on the plane at camera depth z.
std::pair<double, double> ray_at(int u, int v, double z) {
  const Vec3 p = camera_to_bin(kPose) * pinhole_deproject(u, v, z, kCam);
  return {p.x(), p.y()};
}

Scene single(const ObjectTemplate& t, Pose2 pose) {
  Scene s;
  s.objects.push_back(place_object(0, t, pose));
  return s;
}

// Brute-force occlusion: fraction of object i's cells lying under any later object.
double occlusion_oracle(const Scene& s, std::size_t i) {
  const SceneObject& o = s.objects[i];
  const Footprint& f = o.footprint;
  std::size_t total = 0, covered = 0;
  for (int r = 0; r < f.rows; ++r)
    for (int c = 0; c < f.cols; ++c) {
      if (f.at(c, r) <= 0) continue;
      ++total;
      const double lx = (c + 0.5 - f.cols / 2.0) * f.cell_size, ly = (r + 0.5 - f.rows / 2.0) * f.cell_size;
      const double x = o.pose.x + std::cos(o.pose.yaw) * lx - std::sin(o.pose.yaw) * ly;
      const double y = o.pose.y + std::sin(o.pose.yaw) * lx + std::cos(o.pose.yaw) * ly;
      for (std::size_t j = i + 1; j < s.objects.size(); ++j) {
        const SceneObject& q = s.objects[j];
        const double dx = x - q.pose.x, dy = y - q.pose.y;
        const double qx = std::cos(q.pose.yaw) * dx + std::sin(q.pose.yaw) * dy;
        const double qy = -std::sin(q.pose.yaw) * dx + std::cos(q.pose.yaw) * dy;
        if (q.footprint.sample(qx, qy) > 0) {
          ++covered;
          break;
        }
      }
    }
  return static_cast<double>(covered) / static_cast<double>(total);
}

}  // namespace

TEST_CASE("generate_bin with zero objects is empty") {
  const Scene s = generate_bin(7, default_catalog(), 0, Packing::Light);
  CHECK(s.objects.empty());
}

TEST_CASE("generate_bin is deterministic") {
  const auto cat = default_catalog();
  const Scene a = generate_bin(7, cat, 6, Packing::Light);
  const Scene b = generate_bin(7, cat, 6, Packing::Light);
  CHECK(a.serialize() == b.serialize());
  CHECK(a.objects.size() == 6);
  const Scene c = generate_bin(8, cat, 6, Packing::Light);
  CHECK(a.serialize() != c.serialize());
}

TEST_CASE("light packing leaves every object graspable in ground truth") {
  const auto cat = default_catalog();
  for (std::uint64_t seed : {7u, 11u, 23u}) {
    const Scene s = generate_bin(seed, cat, 6, Packing::Light);
    SceneGeometry geo(s);
    for (std::size_t i = 0; i < s.objects.size(); ++i) {
      auto g = find_feasible_grasp(geo, i, GripperParams{});
      REQUIRE(g.has_value());
      const GraspOutcome out = adjudicate(geo, *g, GripperParams{});
      CHECK(out.success);
      CHECK(out.target_object_id == s.objects[i].id);
    }
  }
}

TEST_CASE("dense packing allows overlap") {
  const Scene s = generate_bin(3, default_catalog(), 12, Packing::Dense);
  CHECK(s.objects.size() == 12);
  bool overlap = false;
  for (std::size_t i = 0; i < s.objects.size() && !overlap; ++i) overlap = occlusion_oracle(s, i) > 0;
  CHECK(overlap);
}

TEST_CASE("light packing failure is reported") {
  GenerateParams p;
  p.max_attempts_per_object = 5;
  p.max_layouts = 2;
  CHECK_THROWS_AS(generate_bin(1, default_catalog(), 40, Packing::Light, GripperParams{}, p), Error);
  try {
    generate_bin(1, default_catalog(), 40, Packing::Light, GripperParams{}, p);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::PlacementFailure);
  }
}

TEST_CASE("scene json round trip") {
  const Scene s = generate_bin(5, default_catalog(), 4, Packing::Light);
  const Scene back = Scene::from_json(Json::parse(s.serialize()));
  CHECK(back.serialize() == s.serialize());
}

TEST_CASE("graspable width follows the footprint") {
  const auto cat = default_catalog();
  const SceneObject o = place_object(0, cat[3], {0.2, 0.1, 0.3});
  CHECK(o.class_label == "banana");
  CHECK(o.graspable_width_mm == doctest::Approx(36.0).epsilon(0.06));
}

TEST_CASE("empty scene renders the floor") {
  const DepthFrame d = render_depth(Scene{}, kCam, kPose, NoiseParams::none(), 1);
  CHECK(d.hole_count() == 0);
  for (double x : d.data()) CHECK(x == kPose.height);
}

TEST_CASE("zero hole rate keeps every pixel valid") {
  NoiseParams n;
  n.hole_rate = 0;
  const DepthFrame d = render_depth(generate_bin(2, default_catalog(), 6, Packing::Light), kCam, kPose, n, 9);
  CHECK(d.hole_count() == 0);
}

TEST_CASE("a 40 mm block renders at floor depth minus 40 mm") {
  const Scene s = single(make_box("block", 0.080, 0.040, 0.040), {0.225, 0.125, 0.0});
  const DepthFrame d = render_depth(s, kCam, kPose, NoiseParams::none(), 0);
  const double top = kPose.height - 0.040;
  int inside = 0;
  for (int v = 0; v < kCam.height; ++v)
    for (int u = 0; u < kCam.width; ++u) {
      auto [tx, ty] = ray_at(u, v, top);
      auto [fx, fy] = ray_at(u, v, kPose.height);
      // 1 mm guard band around the block outline on both planes.
      const bool in_top = std::abs(tx - 0.225) < 0.039 && std::abs(ty - 0.125) < 0.019;
      const bool off_floor = std::abs(fx - 0.225) > 0.041 || std::abs(fy - 0.125) > 0.021;
      const bool off_top = std::abs(tx - 0.225) > 0.041 || std::abs(ty - 0.125) > 0.021;
      if (in_top) {
        ++inside;
        CHECK(d.value(u, v) == doctest::Approx(top).epsilon(1e-12));
      } else if (off_floor && off_top) {
        CHECK(d.value(u, v) == kPose.height);
      }
    }
  // 80 x 40 mm at 0.66 m with f = 400 px: about 48 x 24 pixels.
  CHECK(inside > 40 * 20);
  CHECK(inside < 50 * 26);
}

TEST_CASE("ground truth of empty and disjoint scenes") {
  CHECK(render_ground_truth(Scene{}, kCam).empty());
  Scene s;
  s.objects.push_back(place_object(0, make_box("a", 0.05, 0.03, 0.02), {0.10, 0.10, 0.0}));
  s.objects.push_back(place_object(1, make_box("b", 0.05, 0.03, 0.02), {0.30, 0.15, 0.5}));
  const auto gt = render_ground_truth(s, kCam);
  REQUIRE(gt.size() == 2);
  CHECK(gt[0].occlusion == 0.0);
  CHECK(gt[1].occlusion == 0.0);
  CHECK_FALSE(gt[0].degenerate);
}

TEST_CASE("an object fully under another has occlusion 1") {
  Scene s;
  s.objects.push_back(place_object(0, make_box("small", 0.03, 0.03, 0.01), {0.2, 0.12, 0.0}));
  s.objects.push_back(place_object(1, make_box("big", 0.10, 0.10, 0.02), {0.2, 0.12, 0.0}));
  CHECK(occlusion_oracle(s, 0) == 1.0);
  const auto gt = render_ground_truth(s, kCam);
  REQUIRE(gt.size() == 2);
  CHECK(gt[0].occlusion == 1.0);
  CHECK(gt[0].degenerate);
  CHECK(gt[1].occlusion == 0.0);
}

TEST_CASE("partial occlusion matches the brute-force cell count") {
  for (std::uint64_t seed : {1u, 2u, 3u, 4u}) {
    const Scene s = generate_bin(seed, default_catalog(), 8, Packing::Dense);
    const auto gt = render_ground_truth(s, kCam);
    REQUIRE(gt.size() == s.objects.size());
    for (std::size_t i = 0; i < s.objects.size(); ++i)
      CHECK(gt[i].occlusion == doctest::Approx(occlusion_oracle(s, i)).epsilon(1e-12));
  }
}

TEST_CASE("visible pixels inside unoccluded boxes are above the floor") {
  const Scene s = generate_bin(12, default_catalog(), 6, Packing::Light);
  const CleanRender clean = render_clean(s, kCam, kPose);
  const auto gt = render_ground_truth(s, kCam);
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (gt[i].occlusion != 0.0) continue;
    int seen = 0;
    for (int v = 0; v < kCam.height; ++v)
      for (int u = 0; u < kCam.width; ++u)
        if (clean.labels[static_cast<std::size_t>(v) * kCam.width + u] == static_cast<int>(i)) {
          ++seen;
          CHECK(gt[i].box.contains_pixel(u, v));
          CHECK(clean.depth.value(u, v) < kPose.height);
        }
    CHECK(seen > 0);
  }
}

TEST_CASE("gp noise: zero sigma and determinism") {
  NoiseParams n;
  n.sigma_base = 0;
  for (double x : sample_gp_noise(1, 50, 40, n).values) CHECK(x == 0.0);
  n.sigma_base = 0.002;
  CHECK(sample_gp_noise(4, 50, 40, n).values == sample_gp_noise(4, 50, 40, n).values);
  CHECK(sample_gp_noise(4, 50, 40, n).values != sample_gp_noise(5, 50, 40, n).values);
}

TEST_CASE("gp noise moments match the bilinear analytic value") {
  NoiseParams n;
  n.sigma_base = 0.003;
  n.grid_pitch = 4;
  const NoiseField f = sample_gp_noise(2024, 400, 250, n);
  REQUIRE(f.values.size() == 100000);
  double sum = 0, sq = 0;
  for (double x : f.values) sum += x, sq += x * x;
  const double mean = sum / 1e5;
  const double sd = std::sqrt(sq / 1e5 - mean * mean);
  // Per axis a lattice offset t carries weight (1-t)^2 + t^2; average over
  // t in {0, 1/4, 2/4, 3/4} and square for the two axes.
  const double axis = (1.0 + 0.625 + 0.5 + 0.625) / 4.0;
  const double expected = 0.003 * std::sqrt(axis * axis);
  CHECK(std::abs(mean) < 1e-4);
  CHECK(sd == doctest::Approx(expected).epsilon(0.15));
  CHECK(sd < 0.003);
}

TEST_CASE("hole fraction tracks hole_rate over 100 frames") {
  const Scene s = generate_bin(6, default_catalog(), 6, Packing::Light);
  NoiseParams n;
  n.hole_rate = 0.02;
  double holes = 0;
  for (int k = 0; k < 100; ++k) {
    const DepthFrame d = render_depth(s, kCam, kPose, n, 1000 + k);
    holes += static_cast<double>(d.hole_count()) / static_cast<double>(d.mask().size());
    for (int v = 0; v < d.height(); ++v)
      for (int u = 0; u < d.width(); ++u)
        if (!d.valid(u, v)) CHECK(d.value(u, v) == DepthFrame::kHole);
  }
  CHECK(holes / 100 == doctest::Approx(0.02).epsilon(0.2));
}

TEST_CASE("holes concentrate on depth discontinuities") {
  const Scene s = generate_bin(6, default_catalog(), 6, Packing::Light);
  const CleanRender clean = render_clean(s, kCam, kPose);
  auto is_edge = [&](int u, int v) {
    for (int dv = -1; dv <= 1; ++dv)
      for (int du = -1; du <= 1; ++du) {
        const int uu = u + du, vv = v + dv;
        if (clean.depth.in_bounds(uu, vv) && std::abs(clean.depth.value(uu, vv) - clean.depth.value(u, v)) > 0.010)
          return true;
      }
    return false;
  };
  std::size_t edge_px = 0, edge_holes = 0, flat_px = 0, flat_holes = 0;
  NoiseParams n;
  n.hole_blob_radius = 0;
  for (int k = 0; k < 20; ++k) {
    const DepthFrame d = render_depth(s, kCam, kPose, n, 50 + k);
    for (int v = 0; v < d.height(); ++v)
      for (int u = 0; u < d.width(); ++u) {
        const bool e = is_edge(u, v);
        (e ? edge_px : flat_px)++;
        if (!d.valid(u, v)) (e ? edge_holes : flat_holes)++;
      }
  }
  const double edge_rate = static_cast<double>(edge_holes) / edge_px;
  const double flat_rate = static_cast<double>(flat_holes) / flat_px;
  CHECK(edge_rate > 3 * flat_rate);
}

TEST_CASE("render_depth is deterministic per seed") {
  const Scene s = generate_bin(9, default_catalog(), 6, Packing::Light);
  CHECK(render_depth(s, kCam, kPose, NoiseParams{}, 5) == render_depth(s, kCam, kPose, NoiseParams{}, 5));
  CHECK_FALSE(render_depth(s, kCam, kPose, NoiseParams{}, 5) == render_depth(s, kCam, kPose, NoiseParams{}, 6));
}

TEST_CASE("depth frame exports as millimeter png") {
  NoiseParams n;
  n.hole_rate = 0.05;
  const DepthFrame d = render_depth(generate_bin(9, default_catalog(), 6, Packing::Light), kCam, kPose, n, 5);
  const Image16 img = decode_png_gray16(encode_png_gray16(depth_to_mm(d)));
  for (int v = 0; v < d.height(); ++v)
    for (int u = 0; u < d.width(); ++u) {
      const auto mm = img.pixels[static_cast<std::size_t>(v) * img.width + u];
      if (d.valid(u, v))
        CHECK(std::abs(mm - d.value(u, v) * 1000.0) <= 0.5);
      else
        CHECK(mm == 0);
    }
}

TEST_CASE("apply_grasp over empty floor is an empty closure") {
  Scene s = single(make_box("block", 0.04, 0.04, 0.04), {0.1, 0.1, 0.0});
  Rng rng = make_rng({1});
  const GraspOutcome out = apply_grasp(s, {0.35, 0.2, 0.0, 0.0}, GripperParams{}, 0.0, rng);
  CHECK_FALSE(out.success);
  CHECK(out.failure_reason == FailureReason::EmptyClosure);
  CHECK(s.objects.size() == 1);
}

TEST_CASE("apply_grasp across a 40 mm block succeeds and removes it") {
  Scene s = single(make_box("block", 0.080, 0.040, 0.040), {0.225, 0.125, 0.0});
  Rng rng = make_rng({1});
  // Minor axis is world y: yaw pi/2 closes the jaws along y.
  const GraspOutcome out = apply_grasp(s, {0.225, 0.125, 0.040, std::numbers::pi / 2}, GripperParams{}, 0.0, rng);
  CHECK(out.success);
  CHECK(out.removed_object_id == 0);
  CHECK(out.measured_width == doctest::Approx(0.040).epsilon(0.05));
  CHECK(s.objects.empty());
}

TEST_CASE("a 120 mm block exceeds the opening at every yaw") {
  Scene s = single(make_box("slab", 0.120, 0.120, 0.030), {0.225, 0.125, 0.3});
  Rng rng = make_rng({1});
  for (int k = 0; k < 36; ++k) {
    const GraspOutcome out = apply_grasp(s, {0.225, 0.125, 0.030, k * std::numbers::pi / 36}, GripperParams{}, 0.0, rng);
    CHECK_FALSE(out.success);
    CHECK(out.failure_reason == FailureReason::WidthExceeded);
  }
  CHECK(s.objects.size() == 1);
}

TEST_CASE("grasp with a neighbor inside the jaw zone collides") {
  Scene s = single(make_box("block", 0.080, 0.040, 0.040), {0.225, 0.125, 0.0});
  // Second block 4 mm beyond the +y face, inside the jaw landing zone.
  s.objects.push_back(place_object(1, make_box("block", 0.080, 0.040, 0.040), {0.225, 0.125 + 0.040 + 0.004, 0.0}));
  Rng rng = make_rng({1});
  const GraspOutcome out = apply_grasp(s, {0.225, 0.125, 0.040, std::numbers::pi / 2}, GripperParams{}, 0.0, rng);
  CHECK(out.failure_reason == FailureReason::CollisionWithNeighbor);
  CHECK(s.objects.size() == 2);
}

TEST_CASE("grasp closing above the object is poor alignment") {
  Scene s = single(make_box("block", 0.080, 0.040, 0.040), {0.225, 0.125, 0.0});
  Rng rng = make_rng({1});
  const GraspOutcome out = apply_grasp(s, {0.225, 0.125, 0.060, std::numbers::pi / 2}, GripperParams{}, 0.0, rng);
  CHECK(out.failure_reason == FailureReason::PoorAlignment);
}

TEST_CASE("slip fires at the configured rate and conserves the scene") {
  const Scene base = single(make_box("block", 0.080, 0.040, 0.040), {0.225, 0.125, 0.0});
  Rng rng = make_rng({77});
  int slips = 0;
  for (int k = 0; k < 4000; ++k) {
    Scene s = base;
    const GraspOutcome out = apply_grasp(s, {0.225, 0.125, 0.040, std::numbers::pi / 2}, GripperParams{}, 0.1, rng);
    if (out.success) {
      CHECK(s.objects.empty());
    } else {
      CHECK(out.failure_reason == FailureReason::RandomSlip);
      CHECK(s.objects.size() == 1);
      ++slips;
    }
  }
  CHECK(slips / 4000.0 == doctest::Approx(0.1).epsilon(0.15));
}

TEST_CASE("grasp outside the bin is rejected") {
  Scene s;
  Rng rng = make_rng({1});
  CHECK_THROWS_AS(apply_grasp(s, {0.6, 0.1, 0.0, 0.0}, GripperParams{}, 0.0, rng), Error);
}

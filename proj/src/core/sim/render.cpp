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

#include "sim/render.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "common/error.hpp"
#include "common/rng.hpp"

namespace pickcell::sim {
namespace {

constexpr std::uint64_t kNoiseSalt = 0x6e6f697365ULL;
constexpr std::uint64_t kHoleSalt = 0x686f6c6573ULL;
// Neighboring depths further apart than this mark a discontinuity.
constexpr double kEdgeStep = 0.010;

}  // namespace

void NoiseParams::validate() const {
  if (sigma_base < 0 || hole_rate < 0 || hole_blob_radius < 0 || edge_hole_boost < 0)
    fail(ErrorCode::ValidationError, "noise parameters must be non-negative");
  if (grid_pitch < 1) fail(ErrorCode::ValidationError, "grid_pitch must be >= 1");
  if (hole_rate > 0.5) fail(ErrorCode::ValidationError, "hole_rate must be <= 0.5");
}

NoiseField sample_gp_noise(std::uint64_t seed, int width, int height, const NoiseParams& params) {
  if (params.grid_pitch < 1) fail(ErrorCode::InvalidArgument, "grid_pitch must be >= 1");
  NoiseField field{width, height, std::vector<double>(static_cast<std::size_t>(width) * height, 0.0)};
  if (params.sigma_base == 0.0 || width == 0 || height == 0) return field;

  const int p = params.grid_pitch;
  const int gw = (width - 1) / p + 2;
  const int gh = (height - 1) / p + 2;
  std::vector<double> grid(static_cast<std::size_t>(gw) * gh);
  Rng rng = make_rng({seed, kNoiseSalt});
  std::normal_distribution<double> normal(0.0, params.sigma_base);
  for (double& g : grid) g = normal(rng);

  auto node = [&](int gx, int gy) { return grid[static_cast<std::size_t>(gy) * gw + gx]; };
  for (int v = 0; v < height; ++v) {
    const int gy = v / p;
    const double ty = static_cast<double>(v % p) / p;
    for (int u = 0; u < width; ++u) {
      const int gx = u / p;
      const double tx = static_cast<double>(u % p) / p;
      const double top = (1 - tx) * node(gx, gy) + tx * node(gx + 1, gy);
      const double bottom = (1 - tx) * node(gx, gy + 1) + tx * node(gx + 1, gy + 1);
      field.values[static_cast<std::size_t>(v) * width + u] = (1 - ty) * top + ty * bottom;
    }
  }
  return field;
}

CleanRender render_clean(const Scene& scene, const CameraIntrinsics& cam, const CameraPose& pose) {
  cam.validate();
  CleanRender out{DepthFrame(cam.width, cam.height, pose.height, cam.id),
                  std::vector<int>(static_cast<std::size_t>(cam.width) * cam.height, -1)};
  SceneGeometry geo(scene);

  for (std::size_t i = 0; i < scene.objects.size(); ++i) {
    const SceneObject& o = scene.objects[i];
    const Footprint& f = o.footprint;
    const double cyaw = std::cos(o.pose.yaw), syaw = std::sin(o.pose.yaw);
    for (int r = 0; r < f.rows; ++r)
      for (int c = 0; c < f.cols; ++c) {
        const double h = f.at(c, r);
        if (h <= 0) continue;
        const double zc = pose.height - (geo.base(i) + h);
        if (zc <= 0) continue;
        double umin = 1e300, umax = -1e300, vmin = 1e300, vmax = -1e300;
        for (int corner = 0; corner < 4; ++corner) {
          const double lx = (c + (corner & 1) - f.cols / 2.0) * f.cell_size;
          const double ly = (r + (corner >> 1) - f.rows / 2.0) * f.cell_size;
          const double x = o.pose.x + cyaw * lx - syaw * ly;
          const double y = o.pose.y + syaw * lx + cyaw * ly;
          const double u = cam.fx * (x - pose.x) / zc + cam.cx;
          const double v = cam.fy * (pose.y - y) / zc + cam.cy;
          umin = std::min(umin, u), umax = std::max(umax, u);
          vmin = std::min(vmin, v), vmax = std::max(vmax, v);
        }
        const int i0 = std::max(0, static_cast<int>(std::ceil(umin)));
        const int i1 = std::min(cam.width - 1, static_cast<int>(std::floor(umax)));
        const int j0 = std::max(0, static_cast<int>(std::ceil(vmin)));
        const int j1 = std::min(cam.height - 1, static_cast<int>(std::floor(vmax)));
        for (int pv = j0; pv <= j1; ++pv)
          for (int pu = i0; pu <= i1; ++pu) {
            // Back-project the pixel center onto the cell's plane and keep it
            // only if it lands in this very cell.
            const double x = (pu - cam.cx) * zc / cam.fx + pose.x;
            const double y = pose.y - (pv - cam.cy) * zc / cam.fy;
            const double dx = x - o.pose.x, dy = y - o.pose.y;
            const double lx = cyaw * dx + syaw * dy, ly = -syaw * dx + cyaw * dy;
            const int cc = static_cast<int>(std::floor(lx / f.cell_size + f.cols / 2.0));
            const int rr = static_cast<int>(std::floor(ly / f.cell_size + f.rows / 2.0));
            if (cc != c || rr != r) continue;
            if (zc < out.depth.value(pu, pv)) {
              out.depth.set(pu, pv, zc);
              out.labels[static_cast<std::size_t>(pv) * cam.width + pu] = static_cast<int>(i);
            }
          }
      }
  }
  return out;
}

DepthFrame render_depth(const Scene& scene, const CameraIntrinsics& cam, const CameraPose& pose,
                        const NoiseParams& noise, std::uint64_t seed) {
  noise.validate();
  const CleanRender clean = render_clean(scene, cam, pose);
  const int w = cam.width, h = cam.height;
  const NoiseField field = sample_gp_noise(seed, w, h, noise);

  DepthFrame out(w, h, 0.0, cam.id);
  for (int v = 0; v < h; ++v)
    for (int u = 0; u < w; ++u) out.set(u, v, std::clamp(clean.depth.value(u, v) + field.at(u, v), 1e-4, 9.999));

  const auto n = static_cast<std::size_t>(w) * h;
  const auto target = static_cast<std::size_t>(std::llround(noise.hole_rate * static_cast<double>(n)));
  if (target == 0) return out;

  // Blob centers are drawn with extra weight on depth discontinuities.
  std::vector<double> cumulative(n);
  double total = 0;
  for (int v = 0; v < h; ++v)
    for (int u = 0; u < w; ++u) {
      bool edge = false;
      const double d = clean.depth.value(u, v);
      for (int dv = -1; dv <= 1 && !edge; ++dv)
        for (int du = -1; du <= 1 && !edge; ++du) {
          const int uu = u + du, vv = v + dv;
          if (clean.depth.in_bounds(uu, vv) && std::abs(clean.depth.value(uu, vv) - d) > kEdgeStep) edge = true;
        }
      total += edge ? noise.edge_hole_boost : 1.0;
      cumulative[static_cast<std::size_t>(v) * w + u] = total;
    }
  if (total <= 0) return out;

  Rng rng = make_rng({seed, kHoleSalt});
  const int rad = noise.hole_blob_radius;
  std::size_t holes = 0;
  while (holes < target) {
    const double pick = uniform01(rng) * total;
    const auto idx = static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), pick) -
                                              cumulative.begin());
    const int cu = static_cast<int>(std::min(idx, n - 1) % static_cast<std::size_t>(w));
    const int cv = static_cast<int>(std::min(idx, n - 1) / static_cast<std::size_t>(w));
    for (int dv = -rad; dv <= rad; ++dv)
      for (int du = -rad; du <= rad; ++du) {
        if (du * du + dv * dv > rad * rad) continue;
        const int uu = cu + du, vv = cv + dv;
        if (!out.in_bounds(uu, vv) || !out.valid(uu, vv)) continue;
        out.set_hole(uu, vv);
        ++holes;
      }
  }
  return out;
}

std::vector<GroundTruth> render_ground_truth(const Scene& scene, const CameraIntrinsics& cam,
                                             const CameraPose& pose) {
  const CleanRender clean = render_clean(scene, cam, pose);
  SceneGeometry geo(scene);
  std::vector<GroundTruth> out;
  out.reserve(scene.objects.size());

  for (std::size_t i = 0; i < scene.objects.size(); ++i) {
    const SceneObject& o = scene.objects[i];
    GroundTruth gt;
    gt.object_id = o.id;
    gt.class_label = o.class_label;

    std::size_t total = 0, covered = 0;
    for (int r = 0; r < o.footprint.rows; ++r)
      for (int c = 0; c < o.footprint.cols; ++c) {
        if (o.footprint.at(c, r) <= 0) continue;
        ++total;
        auto [x, y] = geo.cell_center(i, c, r);
        auto top = geo.top_at(x, y);
        if (top && top->first != i) ++covered;
      }
    gt.occlusion = total ? static_cast<double>(covered) / static_cast<double>(total) : 1.0;

    int umin = cam.width, vmin = cam.height, umax = -1, vmax = -1;
    for (int v = 0; v < cam.height; ++v)
      for (int u = 0; u < cam.width; ++u)
        if (clean.labels[static_cast<std::size_t>(v) * cam.width + u] == static_cast<int>(i)) {
          umin = std::min(umin, u), umax = std::max(umax, u);
          vmin = std::min(vmin, v), vmax = std::max(vmax, v);
        }
    if (umax < 0) {
      gt.degenerate = true;
      gt.occlusion = 1.0;
    } else {
      gt.box = {static_cast<double>(umin), static_cast<double>(vmin), static_cast<double>(umax + 1),
                static_cast<double>(vmax + 1)};
    }
    out.push_back(std::move(gt));
  }
  return out;
}

}  // namespace pickcell::sim

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
#include <optional>
#include <string>
#include <vector>

#include "common/canonical_json.hpp"
#include "common/rng.hpp"
#include "common/types.hpp"

namespace pickcell::sim {

/// Heightmap patch in the object's own frame, centered on the object origin.
/// Cell (c, r) covers local x in [(c - cols/2) * cell, ...) and likewise for y.
/// A height of zero means the cell is not part of the object.
struct Footprint {
  double cell_size = 0.002;
  int cols = 0;
  int rows = 0;
  std::vector<double> heights;

  double at(int c, int r) const { return heights[static_cast<std::size_t>(r) * cols + c]; }
  double max_height() const;
  std::size_t cell_count() const;
  /// Height at a local-frame point, 0 outside the patch.
  double sample(double lx, double ly) const;
  /// Radius of the circle around the origin that contains the patch.
  double bounding_radius() const;
  /// Narrowest caliper width over all planar directions, meters.
  double min_width() const;

  bool operator==(const Footprint&) const = default;
};

struct ObjectTemplate {
  std::string class_label;
  Footprint footprint;
  double min_width = 0;  // cached Footprint::min_width, meters

  ObjectTemplate() = default;
  ObjectTemplate(std::string label, Footprint f);
};

ObjectTemplate make_box(const std::string& label, double length, double width, double height,
                        double cell = 0.002);
/// Elliptic cap: height falls off as sqrt(1 - r^2) toward the rim.
ObjectTemplate make_dome(const std::string& label, double length, double width, double height,
                         double cell = 0.002);
/// Handle along +y from the origin side, head as a bar across the far end.
ObjectTemplate make_hammer(const std::string& label = "hammer", double cell = 0.002);

/// The six demo objects: hammer, dog, eggplant, banana, duck, bottle.
std::vector<ObjectTemplate> default_catalog();
std::vector<std::string> catalog_labels(const std::vector<ObjectTemplate>& catalog);

struct Pose2 {
  double x = 0;
  double y = 0;
  double yaw = 0;
  bool operator==(const Pose2&) const = default;
};

struct SceneObject {
  int id = 0;
  std::string class_label;
  Pose2 pose;
  Footprint footprint;
  double graspable_width_mm = 0;

  bool operator==(const SceneObject&) const = default;
};

struct BinDims {
  double length = 0.45;
  double width = 0.25;
  double depth = 0.08;
  bool operator==(const BinDims&) const = default;
};

enum class Packing { Light, Dense };
const char* to_string(Packing p);
Packing packing_from_string(const std::string& s);

/// Objects later in the list rest on top of earlier ones where they overlap.
struct Scene {
  BinDims bin;
  std::vector<SceneObject> objects;
  std::uint64_t rng_seed = 0;

  Json to_json() const;
  static Scene from_json(const Json& j);
  /// Canonical serialization: sorted keys, six-decimal floats.
  std::string serialize() const;

  bool operator==(const Scene&) const = default;
};

SceneObject place_object(int id, const ObjectTemplate& tmpl, Pose2 pose);

/// Resolved stacking for a scene snapshot. Cheap to query, must be rebuilt
/// after the scene mutates.
class SceneGeometry {
 public:
  explicit SceneGeometry(const Scene& scene);

  const Scene& scene() const { return *scene_; }
  double base(std::size_t i) const { return bases_[i]; }
  /// Absolute top height of object i at (x, y), nullopt outside its footprint.
  std::optional<double> object_height(std::size_t i, double x, double y) const;
  /// Index and height of the uppermost object at (x, y).
  std::optional<std::pair<std::size_t, double>> top_at(double x, double y) const;
  double surface_height(double x, double y) const;
  /// World position of the center of footprint cell (c, r) of object i.
  std::pair<double, double> cell_center(std::size_t i, int c, int r) const;
  /// True when (x, y) is within object i's bounding circle expanded by `pad`.
  bool near(std::size_t i, double x, double y, double pad) const;

 private:
  std::optional<double> height_upto(std::size_t count, double x, double y) const;

  struct Frame {
    double cos_yaw, sin_yaw, radius2;
  };

  const Scene* scene_;
  std::vector<double> bases_;
  std::vector<Frame> frames_;
};

struct GenerateParams {
  int max_attempts_per_object = 200;
  int max_layouts = 50;  // full restarts before PlacementFailure
  double wall_margin = 0.008;
  double min_gap = 0.012;
};

/// Reproducible bin. Light packing keeps footprints apart and only accepts a
/// layout in which every object keeps at least one feasible top grasp.
Scene generate_bin(std::uint64_t seed, const std::vector<ObjectTemplate>& catalog, int count,
                   Packing packing, const GripperParams& gripper = {},
                   const GenerateParams& params = {});

// --- grasp adjudication ---------------------------------------------------

enum class FailureReason { WidthExceeded, PoorAlignment, CollisionWithNeighbor, RandomSlip, EmptyClosure };
const char* to_string(FailureReason r);

/// Top grasp in the bin (= robot) frame: jaw closing axis along yaw, z is the
/// height of the contact surface above the bin floor.
struct WorldGrasp {
  double x = 0;
  double y = 0;
  double z = 0;
  double yaw = 0;
};

struct GraspOutcome {
  bool success = false;
  std::optional<int> removed_object_id;
  std::optional<FailureReason> failure_reason;
  /// Jaw separation after closing: the grasped chord, 0 when the jaws met.
  double measured_width = 0;
  std::optional<int> target_object_id;
};

struct AdjudicationParams {
  double width_margin = 0.004;
  double clearance = 0.005;
  double sample_step = 0.0005;
};

/// Deterministic part of the outcome, evaluated against the noiseless scene.
GraspOutcome adjudicate(const SceneGeometry& geo, const WorldGrasp& grasp, const GripperParams& gripper,
                        const AdjudicationParams& params = {});

/// Adjudicates, then draws the slip and removes the object on success.
GraspOutcome apply_grasp(Scene& scene, const WorldGrasp& grasp, const GripperParams& gripper,
                         double slip_rate, Rng& rng, const AdjudicationParams& params = {});

/// Exhaustive search over centers on the object's visible cells and 16 yaws.
std::optional<WorldGrasp> find_feasible_grasp(const SceneGeometry& geo, std::size_t index,
                                              const GripperParams& gripper,
                                              const AdjudicationParams& params = {});

}  // namespace pickcell::sim

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
#include <string>
#include <vector>

#include "bus/router.hpp"
#include "controller/kinematics.hpp"
#include "perception/detection.hpp"
#include "perception/pipeline.hpp"
#include "sim/render.hpp"
#include "sim/scene.hpp"

namespace pickcell::harness {

struct SceneConfig {
  std::vector<std::string> catalog;  // labels from the built-in catalog; empty = all
  int count = 6;
  sim::Packing packing = sim::Packing::Light;
  std::uint64_t seed = 7;
  ClassCounts request;               // empty = every object in the generated bin
  bool operator==(const SceneConfig&) const = default;
};

struct TimingConfig {
  int capture_ms = 33;
  int preprocess_ms = 15;
  int inpaint_ms = 20;
  int detect_ms = 350;
  int select_ms = 5;
  int grasp_ms = 70;
  int scan_ms = 10;
  int stage_timeout_ms = 2000;
  bool operator==(const TimingConfig&) const = default;
};

struct BusConfig {
  bus::LinkParams link;
  int heartbeat_ms = 500;
  bool operator==(const BusConfig&) const = default;
};

enum class Placement { Near, Far };
const char* to_string(Placement p);

struct BinsConfig {
  Placement placement = Placement::Far;
  double near_distance = 0.25;
  double far_distance = 0.9;
  double drop_height = 0.15;
  double distance() const { return placement == Placement::Near ? near_distance : far_distance; }
  bool operator==(const BinsConfig&) const = default;
};

struct ControllerSettings {
  int n_frames = 3;
  double empty_closure_mm = 5.0;
  int queue_capacity = 64;
  int max_consecutive_timeouts = 3;
  bool operator==(const ControllerSettings&) const = default;
};

struct AdjudicationConfig {
  double slip_rate = 0.03;
  double width_margin_mm = 4.0;
  double clearance_mm = 5.0;
  bool operator==(const AdjudicationConfig&) const = default;
};

struct RunConfig {
  SceneConfig scene;
  sim::NoiseParams noise;
  perception::DetectorParams detector;
  perception::PerceptionParams perception;
  GripperParams gripper;
  CameraIntrinsics intrinsics;
  CameraPose camera_pose;
  bool extrinsics_from_pose = true;
  controller::Extrinsics extrinsics = controller::Extrinsics::from_pose(CameraPose{});
  controller::MotionProfile motion;
  TimingConfig timing;
  BusConfig bus;
  BinsConfig bins;
  ControllerSettings controller;
  AdjudicationConfig adjudication;
  int episodes = 1;
  int pick_cap_factor = 4;

  void validate() const;
  /// Fully resolved configuration, every field present.
  Json to_json() const;
  /// Strict: unknown keys raise UnknownKey, wrong types raise ParseError
  /// naming the field, out-of-range values raise ValidationError.
  static RunConfig from_json(const Json& j);
  bool operator==(const RunConfig&) const = default;
};

/// Parses JSON with // and /* */ comments. An empty or blank file yields the
/// defaults. Syntax errors raise ParseError with line and column.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
std::string dump_config(const RunConfig& cfg);

/// FNV-1a 64 over the canonical resolved config, as 16 hex digits.
std::string config_hash(const RunConfig& cfg);

std::vector<sim::ObjectTemplate> resolve_catalog(const RunConfig& cfg);

}  // namespace pickcell::harness

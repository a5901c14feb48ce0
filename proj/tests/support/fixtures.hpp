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

#include "perception/pipeline.hpp"
#include "sim/render.hpp"
#include "sim/scene.hpp"

namespace pickcell::testing {

/// Hammer lying with its handle toward the top of the image, optionally with
/// two tall blocks flanking the handle.
sim::Scene hammer_scene(bool walled);

/// True when the bin-frame point lies over the hammer's handle.
bool over_handle(const sim::SceneObject& hammer, double x, double y);

struct PlanResult {
  perception::PlannedGrasp grasp;
  double bin_x = 0;
  double bin_y = 0;
};

/// Noiseless render, box from ground truth, full-frame planning on object 0.
PlanResult plan_on_object(const sim::Scene& scene, int object_id);

/// Bin-frame point under full-frame pixel (u, v) at camera depth z.
std::pair<double, double> pixel_to_bin(double u, double v, double z);

/// Flat 10 mm plate, 72 px square, with a thin 60 mm peg standing at its
/// center and a dropout blob around the peg.
struct BulgeFixture {
  DepthFrame raw;
  BoundingBox plate_box;
  perception::PixelRect hole;
  perception::PixelRect peg;

  /// Inside the dropout blob but off the peg itself.
  bool in_hole(double u, double v) const;
};

BulgeFixture bulge_fixture(bool with_hole = true, bool with_peg = true);

/// Two bananas crossing in a shallow X: their boxes nearly coincide.
sim::Scene crossed_bananas();

}  // namespace pickcell::testing

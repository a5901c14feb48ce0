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

#include "common/types.hpp"
#include "sim/render.hpp"

namespace pickcell::perception {

struct Detection {
  BoundingBox box;
  std::string class_label;
  double confidence = 0;
  // Provenance for failure accounting; not part of what a real detector knows.
  std::vector<int> source_ids;
  bool merged = false;

  bool operator==(const Detection&) const = default;
};

struct MissPoint {
  double occlusion;
  double probability;
  bool operator==(const MissPoint&) const = default;
};

struct ConfidenceModel {
  double base = 0.95;
  double occlusion_penalty = 0.5;
  double jitter_penalty = 0.02;  // per pixel of mean corner displacement
  double floor = 0.05;

  double score(double occlusion, double mean_abs_jitter) const;
  bool operator==(const ConfidenceModel&) const = default;
};

struct DetectorParams {
  std::vector<MissPoint> miss_curve{{0.0, 0.02}, {0.5, 0.3}, {1.0, 1.0}};
  double jitter_sigma = 2.0;
  double merge_iou_threshold = 0.5;
  ConfidenceModel confidence;
  std::uint64_t seed = 1;

  void validate() const;
  /// Piecewise-linear lookup, clamped at the table ends.
  double miss_probability(double occlusion) const;
  bool operator==(const DetectorParams&) const = default;
};

/// Emulated detector: drops objects by occlusion, jitters surviving boxes and
/// merges same-class boxes that overlap beyond the IoU threshold.
std::vector<Detection> detect(const std::vector<sim::GroundTruth>& gt, const DetectorParams& params,
                              std::uint64_t frame_seed, int frame_width, int frame_height);

/// Sum over j != i of area(box_i ∩ box_j) / area(box_i).
double pairwise_overlap_score(const std::vector<BoundingBox>& boxes, std::size_t i);

/// Least-overlapping detection among classes still requested; overlap is
/// scored against every detection. Ties: higher confidence, then lower index.
std::optional<std::size_t> select_object(const std::vector<Detection>& detections, const ClassCounts& request,
                                         const std::vector<std::size_t>& excluded = {});

}  // namespace pickcell::perception

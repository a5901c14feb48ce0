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

#include "perception/detection.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "common/error.hpp"
#include "common/rng.hpp"

namespace pickcell::perception {

double ConfidenceModel::score(double occlusion, double mean_abs_jitter) const {
  return std::clamp(base - occlusion_penalty * occlusion - jitter_penalty * mean_abs_jitter, floor, 1.0);
}

void DetectorParams::validate() const {
  if (miss_curve.empty()) fail(ErrorCode::ValidationError, "miss_curve is empty");
  for (std::size_t i = 0; i < miss_curve.size(); ++i) {
    const auto& p = miss_curve[i];
    if (p.occlusion < 0 || p.occlusion > 1 || p.probability < 0 || p.probability > 1)
      fail(ErrorCode::ValidationError, "miss_curve values must lie in [0, 1]");
    if (i > 0 && (p.occlusion <= miss_curve[i - 1].occlusion || p.probability < miss_curve[i - 1].probability))
      fail(ErrorCode::ValidationError, "miss_curve must be increasing in occlusion and non-decreasing");
  }
  if (miss_curve.back().occlusion != 1.0 || miss_curve.back().probability != 1.0)
    fail(ErrorCode::ValidationError, "miss_curve must end at (1.0, 1.0)");
  if (jitter_sigma < 0) fail(ErrorCode::ValidationError, "jitter_sigma must be non-negative");
  if (merge_iou_threshold < 0 || merge_iou_threshold > 1)
    fail(ErrorCode::ValidationError, "merge_iou_threshold must lie in [0, 1]");
}

double DetectorParams::miss_probability(double occlusion) const {
  if (occlusion <= miss_curve.front().occlusion) return miss_curve.front().probability;
  for (std::size_t i = 1; i < miss_curve.size(); ++i) {
    const auto& a = miss_curve[i - 1];
    const auto& b = miss_curve[i];
    if (occlusion <= b.occlusion) {
      const double t = (occlusion - a.occlusion) / (b.occlusion - a.occlusion);
      return a.probability + t * (b.probability - a.probability);
    }
  }
  return miss_curve.back().probability;
}

std::vector<Detection> detect(const std::vector<sim::GroundTruth>& gt, const DetectorParams& params,
                              std::uint64_t frame_seed, int frame_width, int frame_height) {
  Rng rng = make_rng({params.seed, frame_seed, 0xde7ec7ULL});
  std::normal_distribution<double> jitter(0.0, std::max(params.jitter_sigma, 0.0));
  const double W = frame_width, H = frame_height;

  std::vector<Detection> dets;
  for (const auto& g : gt) {
    const double p_miss = g.degenerate ? 1.0 : params.miss_probability(g.occlusion);
    if (p_miss >= 1.0 || uniform01(rng) < p_miss) continue;

    double d[4] = {0, 0, 0, 0};
    if (params.jitter_sigma > 0)
      for (double& x : d) x = jitter(rng);
    BoundingBox b{std::clamp(g.box.u_min + d[0], 0.0, W), std::clamp(g.box.v_min + d[1], 0.0, H),
                  std::clamp(g.box.u_max + d[2], 0.0, W), std::clamp(g.box.v_max + d[3], 0.0, H)};
    if (b.u_max - b.u_min < 1.0) {
      const double c = std::clamp(0.5 * (b.u_min + b.u_max), 0.5, W - 0.5);
      b.u_min = c - 0.5, b.u_max = c + 0.5;
    }
    if (b.v_max - b.v_min < 1.0) {
      const double c = std::clamp(0.5 * (b.v_min + b.v_max), 0.5, H - 0.5);
      b.v_min = c - 0.5, b.v_max = c + 0.5;
    }
    const double mean_abs = (std::abs(d[0]) + std::abs(d[1]) + std::abs(d[2]) + std::abs(d[3])) / 4.0;
    dets.push_back({b, g.class_label, params.confidence.score(g.occlusion, mean_abs), {g.object_id}, false});
  }

  // Same-class clusters collapse into one box until no pair exceeds the threshold.
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < dets.size() && !changed; ++i)
      for (std::size_t j = i + 1; j < dets.size() && !changed; ++j) {
        if (dets[i].class_label != dets[j].class_label) continue;
        if (iou(dets[i].box, dets[j].box) <= params.merge_iou_threshold) continue;
        dets[i].box = union_box(dets[i].box, dets[j].box);
        dets[i].confidence = std::max(dets[i].confidence, dets[j].confidence);
        dets[i].source_ids.insert(dets[i].source_ids.end(), dets[j].source_ids.begin(), dets[j].source_ids.end());
        dets[i].merged = true;
        dets.erase(dets.begin() + static_cast<std::ptrdiff_t>(j));
        changed = true;
      }
  }
  return dets;
}

double pairwise_overlap_score(const std::vector<BoundingBox>& boxes, std::size_t i) {
  const double own = boxes.at(i).area();
  if (own <= 0) return 0.0;
  double sum = 0;
  for (std::size_t j = 0; j < boxes.size(); ++j)
    if (j != i) sum += intersection_area(boxes[i], boxes[j]);
  return sum / own;
}

std::optional<std::size_t> select_object(const std::vector<Detection>& detections, const ClassCounts& request,
                                         const std::vector<std::size_t>& excluded) {
  std::vector<BoundingBox> boxes;
  boxes.reserve(detections.size());
  for (const auto& d : detections) boxes.push_back(d.box);

  std::optional<std::size_t> best;
  double best_score = 0;
  for (std::size_t i = 0; i < detections.size(); ++i) {
    if (std::find(excluded.begin(), excluded.end(), i) != excluded.end()) continue;
    auto it = request.find(detections[i].class_label);
    if (it == request.end() || it->second <= 0) continue;
    const double score = pairwise_overlap_score(boxes, i);
    if (!best || score < best_score ||
        (score == best_score && detections[i].confidence > detections[*best].confidence)) {
      best = i;
      best_score = score;
    }
  }
  return best;
}

}  // namespace pickcell::perception

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

#include "harness/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "common/canonical_json.hpp"
#include "common/error.hpp"

namespace pickcell::harness {

using bus::SimTime;

using controller::Action;
using controller::CellState;

std::optional<std::string> PickRecord::failure_class() const {
  if (success) return std::nullopt;
  if (on_filled_hole) return "InpaintBulge";
  if (merged) return "MergedBoxes";
  return outcome_reason.value_or("Unknown");
}

Json PickRecord::to_json() const {
  Json j = {{"index", index},
            {"frame_id", frame_id},
            {"class", class_label},
            {"pixel", {{"u", u}, {"v", v}, {"theta", theta}, {"z", z}}},
            {"quality", quality},
            {"robot", {{"x", x}, {"y", y}, {"z", height}, {"yaw", yaw}}},
            {"success", success},
            {"on_filled_hole", on_filled_hole},
            {"merged", merged},
            {"closed_at_ms", closed_at_ms}};
  j["outcome_reason"] = outcome_reason ? Json(*outcome_reason) : Json(nullptr);
  j["failure_class"] = failure_class() ? Json(*failure_class()) : Json(nullptr);
  j["removed_object_id"] = removed_object_id ? Json(*removed_object_id) : Json(nullptr);
  j["removed_class"] = removed_class ? Json(*removed_class) : Json(nullptr);
  j["wrong_object"] = wrong_object();
  j["target_object_id"] = target_object_id ? Json(*target_object_id) : Json(nullptr);
  return j;
}

namespace {

double nearest_rank(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) return 0;
  const auto rank = static_cast<std::size_t>(std::ceil(p * static_cast<double>(sorted.size())));
  return sorted[std::clamp<std::size_t>(rank, 1, sorted.size()) - 1];
}

LatencyStats summarize(std::vector<double> samples) {
  LatencyStats s;
  s.count = static_cast<int>(samples.size());
  s.samples_ms = samples;
  if (samples.empty()) return s;
  std::sort(samples.begin(), samples.end());
  s.min_ms = samples.front();
  s.max_ms = samples.back();
  s.mean_ms = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(samples.size());
  s.p50_ms = nearest_rank(samples, 0.5);
  s.p95_ms = nearest_rank(samples, 0.95);
  return s;
}

bool has(const controller::TransitionRecord& r, Action a) {
  return std::find(r.actions.begin(), r.actions.end(), a) != r.actions.end();
}

bool starts_with(const std::string& s, const char* prefix) { return s.rfind(prefix, 0) == 0; }

double to_ms(SimTime t) { return static_cast<double>(t) / bus::kUsPerMs; }

}  // namespace

Json MetricsSummary::to_json() const {
  return {{"picks_attempted", picks_attempted},
          {"picks_succeeded", picks_succeeded},
          {"success_rate", success_rate},
          {"cycles", cycles},
          {"mean_cycle_s", mean_cycle_s},
          {"picks_per_hour", picks_per_hour},
          {"latency_ms",
           {{"count", latency.count},
            {"min", latency.min_ms},
            {"mean", latency.mean_ms},
            {"p50", latency.p50_ms},
            {"p95", latency.p95_ms},
            {"max", latency.max_ms}}},
          {"failure_counts", failure_counts},
          {"stage_ms", stage_ms}};
}

void MetricsAccumulator::add(const std::vector<controller::TransitionRecord>& log,
                             const std::vector<PickRecord>& picks, int missed_detections) {
  // -1 marks "not running".
  SimTime trigger = -1, cycle_start = -1, frame_ready = -1, select_at = -1, grasp_at = -1;

  for (const auto& r : log) {
    if (r.from == CellState::CaptureFrame && starts_with(r.event, "FrameReady") && trigger >= 0) {
      stages_["capture"].push_back(to_ms(r.time - trigger));
      frame_ready = r.time;
    }
    if (r.from == CellState::Detecting && frame_ready >= 0 &&
        (starts_with(r.event, "DetectionsReady") || starts_with(r.event, "NoRequestedObjectDetected"))) {
      stages_["detect"].push_back(to_ms(r.time - frame_ready));
      frame_ready = -1;
    }
    if (r.from == CellState::SelectingObject && select_at >= 0 &&
        (starts_with(r.event, "ObjectSelected") || starts_with(r.event, "NoGraspFound"))) {
      stages_["select"].push_back(to_ms(r.time - select_at));
      select_at = -1;
    }
    if (r.from == CellState::PlanningGrasp && grasp_at >= 0 &&
        (starts_with(r.event, "GraspFound") || starts_with(r.event, "NoGraspFound"))) {
      stages_["grasp"].push_back(to_ms(r.time - grasp_at));
      grasp_at = -1;
    }

    if (r.to == CellState::Halted) {
      trigger = -1;
      cycle_start = -1;
    }
    const bool resolved = r.to == CellState::UpdatingList || starts_with(r.event, "NothingGrasped");
    if (resolved && cycle_start >= 0) {
      cycles_s_.push_back(to_ms(r.time - cycle_start) / 1000.0);
      cycle_start = -1;
    }

    if (has(r, Action::TriggerCamera)) {
      trigger = r.time;
      if (cycle_start < 0) cycle_start = r.time;
    }
    if (has(r, Action::SelectObject)) select_at = r.time;
    if (has(r, Action::RequestGrasp)) grasp_at = r.time;
    if (has(r, Action::MoveToGrasp) && trigger >= 0) {
      latency_ms_.push_back(to_ms(r.time - trigger));
      trigger = -1;
    }
  }

  attempted_ += static_cast<int>(picks.size());
  for (const auto& p : picks) {
    if (p.success) ++succeeded_;
    if (auto fc = p.failure_class()) ++failures_[*fc];
    if (p.wrong_object()) ++failures_["WrongObject"];
  }
  if (missed_detections > 0) failures_["MissedDetection"] += missed_detections;
}

MetricsSummary MetricsAccumulator::summary() const {
  MetricsSummary m;
  m.picks_attempted = attempted_;
  m.picks_succeeded = succeeded_;
  m.failure_counts = failures_;
  if (attempted_ > 0) m.success_rate = static_cast<double>(succeeded_) / attempted_;
  m.cycles = static_cast<int>(cycles_s_.size());
  if (!cycles_s_.empty()) {
    m.mean_cycle_s = std::accumulate(cycles_s_.begin(), cycles_s_.end(), 0.0) / static_cast<double>(cycles_s_.size());
    if (m.mean_cycle_s > 0) m.picks_per_hour = 3600.0 / m.mean_cycle_s;
  }
  m.latency = summarize(latency_ms_);
  for (const auto& [k, v] : stages_)
    m.stage_ms[k] = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  return m;
}

MetricsSummary compute_metrics(const std::vector<controller::TransitionRecord>& log,
                               const std::vector<PickRecord>& picks, int missed_detections) {
  MetricsAccumulator acc;
  acc.add(log, picks, missed_detections);
  return acc.summary();
}

std::vector<controller::TransitionRecord> parse_transition_log(const std::string& ndjson) {
  std::vector<controller::TransitionRecord> out;
  std::istringstream in(ndjson);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::exception& e) {
      fail(ErrorCode::MalformedLog, "line " + std::to_string(n) + ": " + e.what());
    }
    try {
      out.push_back(controller::TransitionRecord::from_json(j));
    } catch (const Error& e) {
      fail(ErrorCode::MalformedLog, "line " + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

std::string format_transition_log(const std::vector<controller::TransitionRecord>& log) {
  std::string out;
  for (const auto& r : log) {
    out += canonical_dump(r.to_json());
    out += '\n';
  }
  return out;
}

}  // namespace pickcell::harness

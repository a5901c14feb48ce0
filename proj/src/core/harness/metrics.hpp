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

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "controller/controller.hpp"

namespace pickcell::harness {

/// One closed gripper: what was planned and how the adjudicator judged it.
struct PickRecord {
  int index = 0;
  std::uint64_t frame_id = 0;
  std::string class_label;
  double u = 0, v = 0, theta = 0, z = 0, quality = 0;
  double x = 0, y = 0, height = 0, yaw = 0;  // robot frame
  bool success = false;
  std::optional<std::string> outcome_reason;  // GraspOutcome failure reason
  std::optional<int> removed_object_id;
  std::optional<int> target_object_id;
  std::optional<std::string> removed_class;
  bool on_filled_hole = false;
  bool merged = false;
  double closed_at_ms = 0;

  /// Lifted something other than the class the controller will book.
  bool wrong_object() const { return success && removed_class && *removed_class != class_label; }
  /// Single failure class: provenance flags first, then the adjudicator's reason.
  std::optional<std::string> failure_class() const;
  Json to_json() const;
};

struct LatencyStats {
  int count = 0;
  double min_ms = 0, mean_ms = 0, p50_ms = 0, p95_ms = 0, max_ms = 0;
  std::vector<double> samples_ms;
};

struct MetricsSummary {
  int picks_attempted = 0;
  int picks_succeeded = 0;
  double success_rate = 0;
  int cycles = 0;
  double mean_cycle_s = 0;
  double picks_per_hour = 0;
  LatencyStats latency;
  std::map<std::string, int> failure_counts;
  std::map<std::string, double> stage_ms;  // mean per pick

  Json to_json() const;
};

/// Pools several episodes. Cycles and latencies never span an episode boundary.
class MetricsAccumulator {
 public:
  void add(const std::vector<controller::TransitionRecord>& log, const std::vector<PickRecord>& picks,
           int missed_detections = 0);
  MetricsSummary summary() const;

 private:
  std::vector<double> latency_ms_;
  std::vector<double> cycles_s_;
  std::map<std::string, std::vector<double>> stages_;
  std::map<std::string, int> failures_;
  int attempted_ = 0;
  int succeeded_ = 0;
};

/// Latency runs from each TriggerCamera to the MoveToGrasp that follows it;
/// a cycle runs from the first TriggerCamera of an attempt until the attempt
/// resolves (UpdatingList entered or NothingGrasped).
MetricsSummary compute_metrics(const std::vector<controller::TransitionRecord>& log,
                               const std::vector<PickRecord>& picks, int missed_detections = 0);

/// Parses NDJSON transition records; throws MalformedLog.
std::vector<controller::TransitionRecord> parse_transition_log(const std::string& ndjson);
std::string format_transition_log(const std::vector<controller::TransitionRecord>& log);

}  // namespace pickcell::harness

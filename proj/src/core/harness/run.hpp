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

#include "harness/config.hpp"
#include "harness/episode.hpp"
#include "harness/metrics.hpp"

namespace pickcell::harness {

struct EpisodeResult {
  std::uint64_t seed = 0;
  std::string termination;
  double sim_time_s = 0;
  int frames = 0;
  int missed_detections = 0;
  ClassCounts request;
  ClassCounts remaining;
  std::vector<std::string> unavailable;
  MetricsSummary metrics;
  std::vector<PickRecord> picks;
  std::vector<controller::TransitionRecord> transitions;
  std::vector<std::string> faults;
  std::vector<std::uint8_t> busdump;

  Json to_json(const std::string& transition_log_path) const;
};

/// Never throws for component faults: they end the episode and are recorded.
EpisodeResult run_episode(const RunConfig& cfg, std::uint64_t seed, const EpisodeOptions& opts = {});

struct RunResult {
  std::uint64_t seed = 0;
  std::vector<EpisodeResult> episodes;  // episode i runs with seed + i
  MetricsSummary aggregate;
  std::vector<std::uint8_t> busdump;    // episodes back to back on one clock

  bool faulted() const;
};

RunResult run_episodes(const RunConfig& cfg, std::uint64_t seed, int episodes, bool capture_bus = false);

/// Report document. `log_paths[i]` is where episode i's transition log was
/// written, empty when it was not.
Json build_report(const RunConfig& cfg, const RunResult& run, const std::vector<std::string>& log_paths);

inline constexpr const char* kReportNote =
    "Stage compute costs (capture, preprocess, inpaint, detect, select, grasp) are emulated clock charges "
    "taken from timing.*; no inference runs and nothing here is a measured latency.";

}  // namespace pickcell::harness

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

#include "harness/run.hpp"

#include "bus/codec.hpp"
#include "common/error.hpp"

namespace pickcell::harness {

Json EpisodeResult::to_json(const std::string& transition_log_path) const {
  Json picks_json = Json::array();
  for (const auto& p : picks) picks_json.push_back(p.to_json());
  return {{"seed", seed},
          {"termination", termination},
          {"sim_time_s", sim_time_s},
          {"frames", frames},
          {"request", request},
          {"remaining", remaining},
          {"unavailable", unavailable},
          {"metrics", metrics.to_json()},
          {"picks", picks_json},
          {"faults", faults},
          {"transition_count", transitions.size()},
          {"transition_log", transition_log_path.empty() ? Json(nullptr) : Json(transition_log_path)}};
}

EpisodeResult run_episode(const RunConfig& cfg, std::uint64_t seed, const EpisodeOptions& opts) {
  EpisodeResult r;
  r.seed = seed;
  try {
    Episode ep(cfg, seed, opts);
    r.termination = ep.run();
    r.sim_time_s = static_cast<double>(ep.now()) / 1e6;
    r.frames = ep.frames();
    r.missed_detections = ep.missed_detections();
    r.request = ep.initial_request();
    r.remaining = ep.controller().request().remaining;
    r.unavailable.assign(ep.controller().request().unavailable.begin(), ep.controller().request().unavailable.end());
    r.picks = ep.picks();
    r.transitions = ep.transitions();
    r.faults = ep.faults();
    r.busdump = ep.bus_capture();
  } catch (const Error& e) {
    r.termination = "Fault";
    r.faults.push_back(std::string(to_string(e.code())) + ": " + e.what());
  } catch (const std::exception& e) {
    r.termination = "Fault";
    r.faults.push_back(std::string("Internal: ") + e.what());
  }
  r.metrics = compute_metrics(r.transitions, r.picks, r.missed_detections);
  return r;
}

bool RunResult::faulted() const {
  for (const auto& e : episodes)
    if (!e.faults.empty()) return true;
  return false;
}

RunResult run_episodes(const RunConfig& cfg, std::uint64_t seed, int episodes, bool capture_bus) {
  if (episodes < 1) fail(ErrorCode::InvalidArgument, "episodes must be >= 1");
  RunResult run;
  run.seed = seed;
  MetricsAccumulator acc;
  std::uint64_t offset_ms = 0;
  EpisodeOptions opts;
  opts.capture_bus = capture_bus;
  for (int i = 0; i < episodes; ++i) {
    EpisodeResult r = run_episode(cfg, seed + static_cast<std::uint64_t>(i), opts);
    acc.add(r.transitions, r.picks, r.missed_detections);
    if (capture_bus) {
      for (const auto& rec : bus::parse_dump(r.busdump))
        bus::append_dump_record(run.busdump, offset_ms + rec.timestamp_ms, rec.message);
      offset_ms += static_cast<std::uint64_t>(r.sim_time_s * 1000.0) + 1;
      r.busdump.clear();
    }
    run.episodes.push_back(std::move(r));
  }
  run.aggregate = acc.summary();
  return run;
}

Json build_report(const RunConfig& cfg, const RunResult& run, const std::vector<std::string>& log_paths) {
  Json eps = Json::array();
  std::vector<std::string> faults;
  for (std::size_t i = 0; i < run.episodes.size(); ++i) {
    const auto& e = run.episodes[i];
    eps.push_back(e.to_json(i < log_paths.size() ? log_paths[i] : std::string()));
    for (const auto& f : e.faults) faults.push_back("seed " + std::to_string(e.seed) + ": " + f);
  }
  return {{"note", kReportNote},
          {"config_hash", config_hash(cfg)},
          {"seed", run.seed},
          {"episodes", run.episodes.size()},
          {"config", cfg.to_json()},
          {"metrics", run.aggregate.to_json()},
          {"faults", faults},
          {"episode_reports", eps}};
}

}  // namespace pickcell::harness

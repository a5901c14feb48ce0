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

#include <functional>
#include <memory>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "bus/router.hpp"
#include "controller/controller.hpp"
#include "harness/config.hpp"
#include "harness/metrics.hpp"
#include "perception/pipeline.hpp"
#include "sim/scene.hpp"

namespace pickcell::harness {

using bus::SimTime;

struct EpisodeOptions {
  bool capture_bus = false;
  bool render_overlays = false;
  bool stop_when_finished = true;  // headless runs end at Done/ReportingUnavailable/Halted
};

class PerceptionService;
class RobotSim;
class GripperSim;

/// Discrete-event simulation of one cell. Stage costs and link latencies are
/// charges on the simulated clock; nothing depends on wall time.
class Episode {
 public:
  Episode(const RunConfig& cfg, std::uint64_t seed, EpisodeOptions opts = {});
  ~Episode();
  Episode(const Episode&) = delete;
  Episode& operator=(const Episode&) = delete;

  /// Sends a message at the current simulated time.
  void inject(const std::string& from, const std::string& to, bus::MessageType type, Json payload);
  /// Posts the configured request (or every object in the bin) from the HMI.
  bool post_default_request();

  bool step();
  /// Processes every event up to and including `t`, then sets the clock to t.
  void advance_to(SimTime t);
  /// Headless loop; returns the termination reason.
  std::string run();

  SimTime now() const { return now_; }
  bool finished() const { return termination_.has_value(); }
  const std::optional<std::string>& termination() const { return termination_; }
  const controller::Controller& controller() const { return *controller_; }
  const sim::Scene& scene() const { return scene_; }
  sim::Scene& scene_mut();
  const std::vector<controller::TransitionRecord>& transitions() const { return log_; }
  const std::vector<PickRecord>& picks() const { return picks_; }
  int missed_detections() const;
  int frames() const;
  const ClassCounts& initial_request() const { return request_; }
  const std::vector<std::uint8_t>& bus_capture() const { return router_.capture(); }
  const std::vector<std::uint8_t>& latest_overlay_png() const;
  std::vector<std::string> faults() const;

  /// Called for every frame delivered to the HMI endpoint.
  void set_hmi_sink(std::function<void(const bus::Envelope&)> sink) { hmi_sink_ = std::move(sink); }
  /// Silences a component's heartbeat, for fault-injection tests.
  void mute_heartbeat(const std::string& component) { muted_.insert(component); }

  // Component plumbing.
  void send(const std::string& from, const std::string& to, bus::MessageType type, Json payload);
  void schedule_timer(SimTime at, const std::string& component, std::uint64_t token);
  void record_pick(PickRecord r);
  void add_fault(std::string f) { faults_.push_back(std::move(f)); }

 private:
  struct Deliver {
    bus::Envelope env;
  };
  struct Scan {};
  struct Local {
    controller::CellEvent event;
  };
  struct Timer {
    std::string component;
    std::uint64_t token;
  };
  struct Beat {
    std::string component;
  };
  struct BeatCheck {};
  using Payload = std::variant<Deliver, Local, Timer, Beat, BeatCheck, Scan>;
  struct Item {
    SimTime t;
    std::uint64_t order;
    Payload what;
  };
  struct Later {
    bool operator()(const Item& a, const Item& b) const {
      if (a.t != b.t) return a.t > b.t;
      if (a.what.index() != b.what.index()) return a.what.index() > b.what.index();
      return a.order > b.order;
    }
  };

  void push(SimTime t, Payload p);
  void schedule_scan(SimTime at);
  void handle(Item& item);
  void run_scan();
  void drain_hmi();
  void check_termination();

  RunConfig cfg_;
  std::uint64_t seed_;
  EpisodeOptions opts_;
  sim::Scene scene_;
  ClassCounts request_;
  bool request_posted_ = false;
  bool request_active_ = false;
  SimTime now_ = 0;
  std::uint64_t order_ = 0;
  std::priority_queue<Item, std::vector<Item>, Later> queue_;
  std::set<SimTime> scans_;
  bus::Router router_;
  bus::HeartbeatMonitor monitor_;
  std::optional<SimTime> beat_check_at_;
  std::unique_ptr<controller::Controller> controller_;
  std::unique_ptr<PerceptionService> perception_;
  std::unique_ptr<RobotSim> robot_;
  std::unique_ptr<GripperSim> gripper_;
  std::vector<controller::TransitionRecord> log_;
  std::vector<PickRecord> picks_;
  std::vector<std::string> faults_;
  std::set<std::string> muted_;
  std::function<void(const bus::Envelope&)> hmi_sink_;
  std::optional<std::string> termination_;
  int pick_cap_ = 0;
  int frame_cap_ = 0;
};

controller::ControllerConfig make_controller_config(const RunConfig& cfg);

}  // namespace pickcell::harness

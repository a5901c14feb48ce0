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

#include <deque>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "bus/message.hpp"
#include "bus/router.hpp"
#include "controller/dfa.hpp"
#include "controller/kinematics.hpp"
#include "perception/detection.hpp"

namespace pickcell::controller {

using bus::SimTime;

struct ControllerConfig {
  DfaConfig dfa;
  int scan_ms = 10;
  int queue_capacity = 64;
  int stage_timeout_ms = 2000;
  int select_ms = 5;              // clock charge for object selection
  CameraIntrinsics camera;
  Extrinsics extrinsics = Extrinsics::from_pose(CameraPose{});
  MotionProfile motion;
  Vec3 home = Vec3::Zero();       // where the arm starts, robot frame
  Vec3 place_point = Vec3::Zero();

  void validate() const;
};

/// One line of the transition log.
struct TransitionRecord {
  SimTime time = 0;
  CellState from = CellState::Idle;
  std::string event;
  CellState to = CellState::Idle;
  std::vector<Action> actions;

  Json to_json() const;
  static TransitionRecord from_json(const Json& j);
};

struct OutgoingMessage {
  std::string to;
  bus::MessageType type;
  Json payload;
};

struct DelayedEvent {
  SimTime delay = 0;
  CellEvent event;
};

struct ScanResult {
  std::vector<TransitionRecord> transitions;
  std::vector<OutgoingMessage> outbox;
  std::vector<DelayedEvent> local;
};

/// The grasp the controller is currently executing.
struct ActiveGrasp {
  std::uint64_t frame_id = 0;
  std::size_t detection_index = 0;
  std::string class_label;
  double u = 0, v = 0, theta = 0, z = 0, quality = 0, opening_px = 0;
  bool on_filled_hole = false;
  bool merged = false;
  Vec3 target = Vec3::Zero();  // robot frame
  double yaw = 0;
};

/// PLC analog. Bus traffic is converted into events by ingest(); scan() runs
/// one cyclic scan: EStop first, then the inbox in FIFO order.
class Controller {
 public:
  explicit Controller(ControllerConfig cfg);

  const ControllerConfig& config() const { return cfg_; }
  CellState state() const { return state_; }
  const DfaContext& dfa_context() const { return dfa_; }
  const PickRequest& request() const { return dfa_.request; }
  const std::vector<perception::Detection>& detections() const { return detections_; }
  const std::optional<ActiveGrasp>& active_grasp() const { return grasp_; }
  std::uint64_t frame_id() const { return frame_id_; }
  const std::vector<std::string>& faults() const { return faults_; }

  /// Thread-safe. Returns false when the inbox was full; the overflow then
  /// halts the cell on the next scan. EStop always gets through.
  bool push(CellEvent e);
  /// Converts a delivered bus message into inbox events. Stale replies (old
  /// frame or command ids) are dropped.
  void ingest(const bus::Message& msg);
  std::size_t pending() const;

  /// Arms watchdog timeouts that are due at `now`, then drains the inbox.
  ScanResult scan(SimTime now);
  /// Next time a watchdog fires, if one is armed.
  std::optional<SimTime> watchdog_deadline() const;

 private:
  struct Watchdog {
    CellState state;
    std::string stage;
    SimTime deadline;
  };

  void process(const CellEvent& e, SimTime now, ScanResult& out);
  void absorb(const CellEvent& e);
  std::optional<CellEvent> execute(Action a, const CellEvent& cause, SimTime now, ScanResult& out);
  void arm_watchdog(SimTime now);
  void notify(ScanResult& out, const std::string& kind, Json data);

  ControllerConfig cfg_;
  CellState state_ = CellState::Idle;
  DfaContext dfa_;

  mutable std::mutex inbox_mu_;
  std::deque<CellEvent> inbox_;
  bool estop_pending_ = false;
  bool overflow_ = false;

  std::uint64_t frame_id_ = 0;
  std::uint64_t cmd_id_ = 0;
  std::uint64_t robot_cmd_ = 0;
  std::uint64_t close_cmd_ = 0;
  std::uint64_t place_open_cmd_ = 0;
  std::vector<perception::Detection> detections_;
  std::vector<std::size_t> excluded_;
  std::optional<std::size_t> selected_;
  std::optional<ActiveGrasp> grasp_;
  std::vector<std::string> just_unavailable_;
  Vec3 arm_ = Vec3::Zero();
  double expected_motion_s_ = 0;
  std::optional<Watchdog> watchdog_;
  std::vector<std::string> faults_;
};

}  // namespace pickcell::controller

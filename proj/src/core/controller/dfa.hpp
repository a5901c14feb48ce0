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

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "common/canonical_json.hpp"
#include "controller/request.hpp"

namespace pickcell::controller {

enum class CellState {
  Idle,
  AwaitRequest,
  CaptureFrame,
  Detecting,
  SelectingObject,
  PlanningGrasp,
  MovingToGrasp,
  Closing,
  VerifyingGrasp,
  Transporting,
  Placing,
  UpdatingList,
  ReportingUnavailable,
  Done,
  Halted,
};
inline constexpr int kStateCount = 15;

enum class EventKind {
  RequestReceived,
  FrameReady,
  DetectionsReady,
  NoRequestedObjectDetected,
  ObjectSelected,
  GraspFound,
  NoGraspFound,
  MotionDone,
  GripperClosed,
  ObjectVerified,
  NothingGrasped,
  PlaceDone,
  ListFulfilled,
  ListOpen,
  EStop,
  Reset,
  Timeout,
};
inline constexpr int kEventCount = 17;

enum class Action {
  AcceptRequest,
  ClearRequest,
  TriggerCamera,
  RequestDetection,
  ReportUnavailable,
  SelectObject,
  ExcludeCandidate,
  RequestGrasp,
  MoveToGrasp,
  CloseGripper,
  ReopenGripper,
  MoveToPlace,
  OpenGripper,
  UpdateRequest,
  NotifyHmi,
  RecordTimeout,
  StopAll,
  ClearFault,
  LogIgnored,
};

const char* to_string(CellState s);
const char* to_string(EventKind e);
const char* to_string(Action a);
std::optional<CellState> state_from_string(const std::string& s);
std::optional<EventKind> event_from_string(const std::string& s);
std::optional<Action> action_from_string(const std::string& s);
std::array<CellState, kStateCount> all_states();
std::array<EventKind, kEventCount> all_events();

/// Event as consumed by the automaton. Values are copies; `data` holds the
/// message payload the event was derived from, if any.
struct CellEvent {
  EventKind kind = EventKind::Reset;
  double width = 0;                  // GripperClosed: jaw separation, meters
  std::string stage;                 // Timeout: which watchdog fired
  ClassCounts request;               // RequestReceived
  std::vector<std::string> missing;  // frame results: actionable classes absent from the frame
  Json data;

  static CellEvent of(EventKind k) {
    CellEvent e;
    e.kind = k;
    return e;
  }
  std::string describe() const;
};

struct DfaConfig {
  int n_frames = 3;                  // consecutive empty frames before a class is unavailable
  double empty_closure = 0.005;      // jaw separation below which nothing was grasped, meters
  int max_consecutive_timeouts = 3;
  bool operator==(const DfaConfig&) const = default;
};

/// Read-only view the guards need.
struct DfaContext {
  DfaConfig config;
  PickRequest request;
  std::map<std::string, int> miss_counts;
  int consecutive_timeouts = 0;
};

struct StepResult {
  CellState next = CellState::Idle;
  std::vector<Action> actions;
  std::optional<CellEvent> follow_up;  // consumed immediately, in the same scan
  bool ignored = false;
};

/// Classes that reach the consecutive-miss limit with this frame and have not
/// been reported yet.
std::vector<std::string> classes_becoming_unavailable(const CellEvent& frame_event, const DfaContext& ctx);

/// Total transition function. Unexpected pairs return the same state with
/// LogIgnored; EStop always yields Halted with StopAll.
StepResult dfa_step(CellState state, const CellEvent& event, const DfaContext& ctx);

}  // namespace pickcell::controller

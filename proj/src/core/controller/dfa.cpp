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

#include "controller/dfa.hpp"

#include <algorithm>

namespace pickcell::controller {

namespace {

constexpr std::array<const char*, kStateCount> kStateNames = {
    "Idle",          "AwaitRequest", "CaptureFrame", "Detecting",      "SelectingObject",
    "PlanningGrasp", "MovingToGrasp", "Closing",     "VerifyingGrasp", "Transporting",
    "Placing",       "UpdatingList", "ReportingUnavailable", "Done",   "Halted",
};

constexpr std::array<const char*, kEventCount> kEventNames = {
    "RequestReceived", "FrameReady",     "DetectionsReady", "NoRequestedObjectDetected",
    "ObjectSelected",  "GraspFound",     "NoGraspFound",    "MotionDone",
    "GripperClosed",   "ObjectVerified", "NothingGrasped",  "PlaceDone",
    "ListFulfilled",   "ListOpen",       "EStop",           "Reset",
    "Timeout",
};

constexpr std::array<const char*, 19> kActionNames = {
    "AcceptRequest", "ClearRequest", "TriggerCamera", "RequestDetection", "ReportUnavailable",
    "SelectObject",  "ExcludeCandidate", "RequestGrasp", "MoveToGrasp",   "CloseGripper",
    "ReopenGripper", "MoveToPlace",  "OpenGripper",   "UpdateRequest",    "NotifyHmi",
    "RecordTimeout", "StopAll",      "ClearFault",    "LogIgnored",
};

template <typename E, std::size_t N>
std::optional<E> lookup(const std::array<const char*, N>& names, const std::string& s) {
  for (std::size_t i = 0; i < N; ++i)
    if (s == names[i]) return static_cast<E>(i);
  return std::nullopt;
}

StepResult go(CellState next, std::vector<Action> actions, std::optional<CellEvent> follow = std::nullopt) {
  return {next, std::move(actions), std::move(follow), false};
}

StepResult ignore(CellState s) { return {s, {Action::LogIgnored}, std::nullopt, true}; }

bool working(CellState s) {
  switch (s) {
    case CellState::CaptureFrame:
    case CellState::Detecting:
    case CellState::SelectingObject:
    case CellState::PlanningGrasp:
    case CellState::MovingToGrasp:
    case CellState::Closing:
    case CellState::VerifyingGrasp:
    case CellState::Transporting:
    case CellState::Placing:
    case CellState::UpdatingList:
      return true;
    default:
      return false;
  }
}

bool jaws_may_hold(CellState s) {
  return s == CellState::Closing || s == CellState::VerifyingGrasp || s == CellState::Transporting ||
         s == CellState::Placing;
}

StepResult verify_width(const CellEvent& e, const DfaContext& ctx) {
  return go(CellState::VerifyingGrasp, {},
            CellEvent::of(e.width < ctx.config.empty_closure ? EventKind::NothingGrasped : EventKind::ObjectVerified));
}

// Result of a frame: report classes that ran out of chances, otherwise carry on.
StepResult frame_result(const CellEvent& e, const DfaContext& ctx) {
  const auto gone = classes_becoming_unavailable(e, ctx);
  const bool found = e.kind == EventKind::DetectionsReady;
  if (gone.empty()) {
    if (found) return go(CellState::SelectingObject, {Action::SelectObject});
    return go(CellState::CaptureFrame, {Action::TriggerCamera});
  }
  std::optional<CellEvent> follow;
  if (found) {
    follow = CellEvent::of(EventKind::DetectionsReady);
  } else {
    auto left = ctx.request.actionable();
    for (const auto& g : gone) left.erase(g);
    if (!left.empty()) follow = CellEvent::of(EventKind::ListOpen);
  }
  return go(CellState::ReportingUnavailable, {Action::ReportUnavailable, Action::NotifyHmi}, std::move(follow));
}

}  // namespace

const char* to_string(CellState s) { return kStateNames[static_cast<std::size_t>(s)]; }
const char* to_string(EventKind e) { return kEventNames[static_cast<std::size_t>(e)]; }
const char* to_string(Action a) { return kActionNames[static_cast<std::size_t>(a)]; }
std::optional<CellState> state_from_string(const std::string& s) { return lookup<CellState>(kStateNames, s); }
std::optional<EventKind> event_from_string(const std::string& s) { return lookup<EventKind>(kEventNames, s); }
std::optional<Action> action_from_string(const std::string& s) { return lookup<Action>(kActionNames, s); }

std::array<CellState, kStateCount> all_states() {
  std::array<CellState, kStateCount> out{};
  for (int i = 0; i < kStateCount; ++i) out[i] = static_cast<CellState>(i);
  return out;
}

std::array<EventKind, kEventCount> all_events() {
  std::array<EventKind, kEventCount> out{};
  for (int i = 0; i < kEventCount; ++i) out[i] = static_cast<EventKind>(i);
  return out;
}

std::string CellEvent::describe() const {
  std::string s = to_string(kind);
  if (kind == EventKind::GripperClosed) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "(%.6f)", width);
    s += buf;
  } else if (kind == EventKind::Timeout) {
    s += "(" + stage + ")";
  }
  return s;
}

std::vector<std::string> classes_becoming_unavailable(const CellEvent& e, const DfaContext& ctx) {
  std::vector<std::string> out;
  const auto open = ctx.request.actionable();
  for (const auto& label : e.missing) {
    if (!open.count(label)) continue;
    const auto it = ctx.miss_counts.find(label);
    const int before = it == ctx.miss_counts.end() ? 0 : it->second;
    if (before + 1 >= ctx.config.n_frames) out.push_back(label);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

StepResult dfa_step(CellState s, const CellEvent& e, const DfaContext& ctx) {
  using S = CellState;
  using E = EventKind;
  using A = Action;

  if (e.kind == E::EStop) return go(S::Halted, {A::StopAll});

  if (e.kind == E::Timeout && working(s)) {
    if (ctx.consecutive_timeouts + 1 >= ctx.config.max_consecutive_timeouts)
      return go(S::Halted, {A::RecordTimeout, A::StopAll});
    std::vector<Action> acts{A::RecordTimeout};
    if (jaws_may_hold(s)) acts.push_back(A::ReopenGripper);
    acts.push_back(A::TriggerCamera);
    return go(S::CaptureFrame, std::move(acts));
  }

  switch (s) {
    case S::Idle:
    case S::AwaitRequest:
    case S::Done:
      if (e.kind == E::RequestReceived) return go(S::CaptureFrame, {A::AcceptRequest, A::TriggerCamera});
      if (e.kind == E::Reset) return go(S::AwaitRequest, {A::ClearRequest});
      break;
    case S::CaptureFrame:
      if (e.kind == E::FrameReady) return go(S::Detecting, {A::RequestDetection});
      break;
    case S::Detecting:
      if (e.kind == E::DetectionsReady || e.kind == E::NoRequestedObjectDetected) return frame_result(e, ctx);
      break;
    case S::SelectingObject:
      if (e.kind == E::ObjectSelected) return go(S::PlanningGrasp, {A::RequestGrasp});
      // Every candidate of this frame is used up.
      if (e.kind == E::NoGraspFound) return go(S::CaptureFrame, {A::TriggerCamera});
      break;
    case S::PlanningGrasp:
      if (e.kind == E::GraspFound) return go(S::MovingToGrasp, {A::MoveToGrasp});
      if (e.kind == E::NoGraspFound) return go(S::SelectingObject, {A::ExcludeCandidate, A::SelectObject});
      break;
    case S::MovingToGrasp:
      if (e.kind == E::MotionDone) return go(S::Closing, {A::CloseGripper});
      break;
    case S::Closing:
      if (e.kind == E::GripperClosed) return verify_width(e, ctx);
      break;
    case S::VerifyingGrasp:
      if (e.kind == E::GripperClosed) return verify_width(e, ctx);
      if (e.kind == E::NothingGrasped) return go(S::CaptureFrame, {A::ReopenGripper, A::TriggerCamera});
      if (e.kind == E::ObjectVerified) return go(S::Transporting, {A::MoveToPlace});
      break;
    case S::Transporting:
      if (e.kind == E::MotionDone) return go(S::Placing, {A::OpenGripper});
      break;
    case S::Placing:
      if (e.kind == E::PlaceDone) return go(S::UpdatingList, {A::UpdateRequest});
      break;
    case S::UpdatingList:
      if (e.kind == E::ListFulfilled) return go(S::Done, {A::NotifyHmi});
      if (e.kind == E::ListOpen) {
        if (ctx.request.actionable().empty()) return go(S::Done, {A::NotifyHmi});
        return go(S::CaptureFrame, {A::TriggerCamera});
      }
      break;
    case S::ReportingUnavailable:
      if (e.kind == E::RequestReceived) return go(S::CaptureFrame, {A::AcceptRequest, A::TriggerCamera});
      if (e.kind == E::Reset) return go(S::AwaitRequest, {A::ClearRequest});
      if (e.kind == E::DetectionsReady) return go(S::SelectingObject, {A::SelectObject});
      if (e.kind == E::ListOpen && !ctx.request.actionable().empty()) return go(S::CaptureFrame, {A::TriggerCamera});
      break;
    case S::Halted:
      if (e.kind == E::Reset) return go(S::Idle, {A::ClearFault});
      break;
  }
  return ignore(s);
}

}  // namespace pickcell::controller

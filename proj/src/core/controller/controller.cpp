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

#include "controller/controller.hpp"

#include <algorithm>
#include <cmath>

#include "common/error.hpp"

namespace pickcell::controller {

namespace {

constexpr SimTime seconds(double s) { return static_cast<SimTime>(std::llround(s * 1e6)); }

perception::Detection detection_from_json(const Json& j) {
  perception::Detection d;
  const auto& b = j.at("box");
  d.box = {b[0].get<double>(), b[1].get<double>(), b[2].get<double>(), b[3].get<double>()};
  d.class_label = j.at("label").get<std::string>();
  d.confidence = j.at("confidence").get<double>();
  d.merged = j.at("merged").get<bool>();
  d.source_ids = j.at("source_ids").get<std::vector<int>>();
  return d;
}

Json counts_json(const ClassCounts& c) {
  Json j = Json::object();
  for (const auto& [label, n] : c) j[label] = n;
  return j;
}

}  // namespace

void ControllerConfig::validate() const {
  if (dfa.n_frames < 1) fail(ErrorCode::ValidationError, "n_frames must be at least 1");
  if (!(dfa.empty_closure > 0)) fail(ErrorCode::ValidationError, "empty_closure must be positive");
  if (dfa.max_consecutive_timeouts < 1) fail(ErrorCode::ValidationError, "max_consecutive_timeouts must be at least 1");
  if (scan_ms < 1) fail(ErrorCode::ValidationError, "scan_ms must be at least 1");
  if (queue_capacity < 1) fail(ErrorCode::ValidationError, "queue_capacity must be at least 1");
  if (stage_timeout_ms < 1) fail(ErrorCode::ValidationError, "stage_timeout_ms must be at least 1");
  if (select_ms < 0) fail(ErrorCode::ValidationError, "select_ms must be non-negative");
  camera.validate();
  extrinsics.validate();
  motion.validate();
}

Json TransitionRecord::to_json() const {
  Json acts = Json::array();
  for (Action a : actions) acts.push_back(to_string(a));
  return {{"timestamp_ms", static_cast<double>(time) / bus::kUsPerMs},
          {"state_from", to_string(from)},
          {"event", event},
          {"state_to", to_string(to)},
          {"actions", acts}};
}

TransitionRecord TransitionRecord::from_json(const Json& j) {
  TransitionRecord r;
  try {
    r.time = static_cast<SimTime>(std::llround(j.at("timestamp_ms").get<double>() * bus::kUsPerMs));
    const auto from = state_from_string(j.at("state_from").get<std::string>());
    const auto to = state_from_string(j.at("state_to").get<std::string>());
    if (!from || !to) fail(ErrorCode::MalformedLog, "unknown state name");
    r.from = *from;
    r.to = *to;
    r.event = j.at("event").get<std::string>();
    for (const auto& a : j.at("actions")) {
      const auto act = action_from_string(a.get<std::string>());
      if (!act) fail(ErrorCode::MalformedLog, "unknown action " + a.get<std::string>());
      r.actions.push_back(*act);
    }
  } catch (const Json::exception& e) {
    fail(ErrorCode::MalformedLog, e.what());
  }
  return r;
}

Controller::Controller(ControllerConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  dfa_.config = cfg_.dfa;
  arm_ = cfg_.home;
}

bool Controller::push(CellEvent e) {
  std::lock_guard lock(inbox_mu_);
  if (e.kind == EventKind::EStop) {
    estop_pending_ = true;
    return true;
  }
  if (static_cast<int>(inbox_.size()) >= cfg_.queue_capacity) {
    overflow_ = true;
    return false;
  }
  inbox_.push_back(std::move(e));
  return true;
}

std::size_t Controller::pending() const {
  std::lock_guard lock(inbox_mu_);
  return inbox_.size() + (estop_pending_ ? 1 : 0) + (overflow_ ? 1 : 0);
}

void Controller::ingest(const bus::Message& msg) {
  using bus::MessageType;
  const Json& p = msg.payload;
  switch (msg.type) {
    case MessageType::PickRequest: {
      CellEvent e = CellEvent::of(EventKind::RequestReceived);
      for (const auto& [label, n] : p.at("request").items()) e.request[label] = n.get<int>();
      push(std::move(e));
      break;
    }
    case MessageType::FrameReady:
      if (p.at("frame_id").get<std::uint64_t>() == frame_id_) {
        CellEvent e = CellEvent::of(EventKind::FrameReady);
        e.data = p;
        push(std::move(e));
      }
      break;
    case MessageType::DetectionResult: {
      if (p.at("frame_id").get<std::uint64_t>() != frame_id_) break;
      std::set<std::string> seen;
      for (const auto& d : p.at("detections")) seen.insert(d.at("label").get<std::string>());
      bool any = false;
      CellEvent e;
      for (const auto& label : dfa_.request.actionable()) {
        if (seen.count(label))
          any = true;
        else
          e.missing.push_back(label);
      }
      e.kind = any ? EventKind::DetectionsReady : EventKind::NoRequestedObjectDetected;
      e.data = p;
      push(std::move(e));
      break;
    }
    case MessageType::GraspResult: {
      if (p.at("frame_id").get<std::uint64_t>() != frame_id_) break;
      if (!selected_ || p.at("detection_index").get<std::size_t>() != *selected_) break;
      CellEvent e = CellEvent::of(EventKind::NoGraspFound);
      e.data = p;
      if (p.at("found").get<bool>()) {
        try {
          deproject(p.at("u").get<double>(), p.at("v").get<double>(), p.at("z").get<double>(), cfg_.camera);
          e.kind = EventKind::GraspFound;
        } catch (const Error& err) {
          e.stage = to_string(err.code());
        }
      }
      push(std::move(e));
      break;
    }
    case MessageType::RobotStatus:
      if (p.at("cmd_id").get<std::uint64_t>() == robot_cmd_ && p.at("state") == "done")
        push(CellEvent::of(EventKind::MotionDone));
      break;
    case MessageType::GripperStatus: {
      const auto id = p.at("cmd_id").get<std::uint64_t>();
      const std::string action = p.at("action").get<std::string>();
      if (action == "close" && id == close_cmd_) {
        CellEvent e = CellEvent::of(EventKind::GripperClosed);
        e.width = p.at("width").get<double>();
        push(std::move(e));
      } else if (action == "open" && id == place_open_cmd_) {
        push(CellEvent::of(EventKind::PlaceDone));
      }
      break;
    }
    case MessageType::EStop:
      push(CellEvent::of(EventKind::EStop));
      break;
    case MessageType::HmiEvent:
      if (p.at("kind") == "command.reset") push(CellEvent::of(EventKind::Reset));
      break;
    default:
      break;
  }
}

std::optional<SimTime> Controller::watchdog_deadline() const {
  if (!watchdog_ || watchdog_->state != state_) return std::nullopt;
  return watchdog_->deadline;
}

ScanResult Controller::scan(SimTime now) {
  ScanResult out;
  if (watchdog_ && watchdog_->state == state_ && now >= watchdog_->deadline) {
    CellEvent t = CellEvent::of(EventKind::Timeout);
    t.stage = watchdog_->stage;
    watchdog_.reset();
    push(std::move(t));
  }
  std::deque<CellEvent> batch;
  bool estop = false, overflow = false;
  {
    std::lock_guard lock(inbox_mu_);
    batch.swap(inbox_);
    std::swap(estop, estop_pending_);
    std::swap(overflow, overflow_);
  }
  if (overflow) {
    faults_.push_back("event queue overflow");
    CellEvent e = CellEvent::of(EventKind::EStop);
    e.stage = "queue_overflow";
    process(e, now, out);
  }
  if (estop) process(CellEvent::of(EventKind::EStop), now, out);
  for (const auto& e : batch) process(e, now, out);
  for (const auto& t : out.transitions) out.outbox.push_back({"hmi", bus::MessageType::HmiEvent, {{"kind", "transition"}, {"data", t.to_json()}}});
  return out;
}

void Controller::process(const CellEvent& e, SimTime now, ScanResult& out) {
  const StepResult r = dfa_step(state_, e, dfa_);
  out.transitions.push_back({now, state_, e.describe(), r.next, r.actions});
  if (!r.ignored) {
    try {
      absorb(e);
    } catch (const std::exception& ex) {
      faults_.push_back("malformed " + e.describe() + ": " + ex.what());
    }
  }
  state_ = r.next;
  std::vector<CellEvent> immediate;
  for (Action a : r.actions)
    if (auto ev = execute(a, e, now, out)) immediate.push_back(std::move(*ev));
  if (!r.ignored) arm_watchdog(now);
  if (r.follow_up) process(*r.follow_up, now, out);
  for (const auto& ev : immediate) process(ev, now, out);
}

void Controller::absorb(const CellEvent& e) {
  switch (e.kind) {
    case EventKind::FrameReady:
      dfa_.consecutive_timeouts = 0;
      break;
    case EventKind::DetectionsReady:
    case EventKind::NoRequestedObjectDetected:
      if (!e.data.is_object()) break;  // follow-up replay of the same frame
      detections_.clear();
      for (const auto& d : e.data.at("detections")) detections_.push_back(detection_from_json(d));
      excluded_.clear();
      selected_.reset();
      for (const auto& label : dfa_.request.actionable()) {
        const bool missing = std::find(e.missing.begin(), e.missing.end(), label) != e.missing.end();
        dfa_.miss_counts[label] = missing ? dfa_.miss_counts[label] + 1 : 0;
      }
      break;
    case EventKind::ObjectSelected:
      if (e.data.is_object()) selected_ = e.data.at("index").get<std::size_t>();
      break;
    case EventKind::GraspFound: {
      if (!e.data.is_object()) break;
      const Json& p = e.data;
      ActiveGrasp g;
      g.frame_id = p.at("frame_id").get<std::uint64_t>();
      g.detection_index = p.at("detection_index").get<std::size_t>();
      if (g.detection_index < detections_.size()) {
        g.class_label = detections_[g.detection_index].class_label;
        g.merged = detections_[g.detection_index].merged;
      }
      g.u = p.at("u").get<double>();
      g.v = p.at("v").get<double>();
      g.theta = p.at("theta").get<double>();
      g.z = p.at("z").get<double>();
      g.quality = p.value("quality", 0.0);
      g.opening_px = p.value("opening_px", 0.0);
      g.on_filled_hole = p.value("on_filled_hole", false);
      g.target = to_robot_frame(deproject(g.u, g.v, g.z, cfg_.camera), cfg_.extrinsics);
      g.yaw = to_robot_yaw(g.theta, cfg_.extrinsics);
      grasp_ = g;
      break;
    }
    default:
      break;
  }
}

void Controller::notify(ScanResult& out, const std::string& kind, Json data) {
  out.outbox.push_back({"hmi", bus::MessageType::HmiEvent, {{"kind", kind}, {"data", std::move(data)}}});
}

std::optional<CellEvent> Controller::execute(Action a, const CellEvent& cause, SimTime now, ScanResult& out) {
  (void)now;
  using bus::MessageType;
  switch (a) {
    case Action::AcceptRequest:
      dfa_.request = PickRequest{cause.request, {}};
      dfa_.miss_counts.clear();
      dfa_.consecutive_timeouts = 0;
      notify(out, "request", counts_json(cause.request));
      break;
    case Action::ClearRequest:
      dfa_.request = {};
      dfa_.miss_counts.clear();
      break;
    case Action::TriggerCamera:
      ++frame_id_;
      detections_.clear();
      excluded_.clear();
      selected_.reset();
      out.outbox.push_back({"perception", MessageType::TriggerFrame, {{"mode", "capture"}, {"frame_id", frame_id_}}});
      break;
    case Action::RequestDetection: {
      ClassCounts open;
      for (const auto& label : dfa_.request.actionable()) open[label] = dfa_.request.remaining.at(label);
      out.outbox.push_back({"perception", MessageType::TriggerFrame,
                            {{"mode", "detect"}, {"frame_id", frame_id_}, {"request", counts_json(open)}}});
      break;
    }
    case Action::ReportUnavailable: {
      Json labels = Json::array();
      for (const auto& label : dfa_.request.actionable()) {
        if (dfa_.miss_counts[label] < cfg_.dfa.n_frames) continue;
        auto upd = mark_unavailable(dfa_.request, label);
        dfa_.request = upd.request;
        if (upd.newly_unavailable) labels.push_back(label);
      }
      notify(out, "unavailable", {{"classes", labels}});
      break;
    }
    case Action::SelectObject: {
      ClassCounts open;
      for (const auto& label : dfa_.request.actionable()) open[label] = dfa_.request.remaining.at(label);
      const auto idx = perception::select_object(detections_, open, excluded_);
      CellEvent e = CellEvent::of(idx ? EventKind::ObjectSelected : EventKind::NoGraspFound);
      if (idx) e.data = {{"index", *idx}};
      Json dets = Json::array();
      for (const auto& d : detections_)
        dets.push_back({{"box", {d.box.u_min, d.box.v_min, d.box.u_max, d.box.v_max}},
                        {"label", d.class_label},
                        {"confidence", d.confidence}});
      notify(out, "detections", {{"frame_id", frame_id_}, {"detections", dets}, {"selected", idx ? Json(*idx) : Json(nullptr)}});
      out.local.push_back({static_cast<SimTime>(cfg_.select_ms) * bus::kUsPerMs, std::move(e)});
      break;
    }
    case Action::ExcludeCandidate:
      if (selected_) excluded_.push_back(*selected_);
      selected_.reset();
      break;
    case Action::RequestGrasp:
      if (!selected_) {
        faults_.push_back("grasp requested without a selected object");
        break;
      }
      out.outbox.push_back({"perception", MessageType::TriggerFrame,
                            {{"mode", "grasp"}, {"frame_id", frame_id_}, {"detection_index", *selected_}}});
      break;
    case Action::MoveToGrasp: {
      if (!grasp_) {
        faults_.push_back("move requested without a grasp");
        break;
      }
      const ActiveGrasp& g = *grasp_;
      robot_cmd_ = ++cmd_id_;
      expected_motion_s_ = grasp_move_time(arm_, g.target, cfg_.motion);
      arm_ = g.target;
      out.outbox.push_back({"robot", MessageType::RobotMove,
                            {{"cmd_id", robot_cmd_}, {"kind", "grasp"}, {"x", g.target.x()}, {"y", g.target.y()},
                             {"z", g.target.z()}, {"yaw", g.yaw}}});
      notify(out, "grasp", {{"frame_id", g.frame_id}, {"detection_index", g.detection_index}, {"class_label", g.class_label},
                            {"u", g.u}, {"v", g.v}, {"theta", g.theta}, {"z", g.z}, {"quality", g.quality}});
      break;
    }
    case Action::CloseGripper:
      close_cmd_ = ++cmd_id_;
      out.outbox.push_back({"gripper", MessageType::GripperCmd, {{"cmd_id", close_cmd_}, {"action", "close"}}});
      break;
    case Action::ReopenGripper:
      out.outbox.push_back({"gripper", MessageType::GripperCmd, {{"cmd_id", ++cmd_id_}, {"action", "open"}}});
      break;
    case Action::MoveToPlace: {
      robot_cmd_ = ++cmd_id_;
      expected_motion_s_ = place_move_time(arm_, cfg_.place_point, cfg_.motion);
      arm_ = cfg_.place_point;
      const Vec3& p = cfg_.place_point;
      out.outbox.push_back({"robot", MessageType::RobotMove,
                            {{"cmd_id", robot_cmd_}, {"kind", "place"}, {"x", p.x()}, {"y", p.y()}, {"z", p.z()}, {"yaw", 0.0}}});
      break;
    }
    case Action::OpenGripper:
      place_open_cmd_ = ++cmd_id_;
      out.outbox.push_back({"gripper", MessageType::GripperCmd, {{"cmd_id", place_open_cmd_}, {"action", "open"}}});
      break;
    case Action::UpdateRequest: {
      const std::string label = grasp_ ? grasp_->class_label : std::string();
      const auto upd = mark_verified(dfa_.request, label);
      dfa_.request = upd.request;
      notify(out, "picked", {{"class_label", label}, {"remaining", counts_json(dfa_.request.remaining)}});
      return CellEvent::of(upd.signal == ListSignal::ListFulfilled ? EventKind::ListFulfilled : EventKind::ListOpen);
    }
    case Action::NotifyHmi: {
      Json unavailable = Json::array();
      for (const auto& label : dfa_.request.unavailable) unavailable.push_back(label);
      notify(out, "notice",
             {{"state", to_string(state_)}, {"remaining", counts_json(dfa_.request.remaining)}, {"unavailable", unavailable}});
      break;
    }
    case Action::RecordTimeout:
      ++dfa_.consecutive_timeouts;
      faults_.push_back("timeout in stage " + cause.stage);
      break;
    case Action::StopAll:
      for (const char* to : {"robot", "gripper", "perception"}) out.outbox.push_back({to, MessageType::EStop, Json::object()});
      watchdog_.reset();
      break;
    case Action::ClearFault:
      dfa_.consecutive_timeouts = 0;
      break;
    case Action::LogIgnored:
      break;
  }
  return std::nullopt;
}

void Controller::arm_watchdog(SimTime now) {
  const SimTime base = static_cast<SimTime>(cfg_.stage_timeout_ms) * bus::kUsPerMs;
  auto set = [&](const char* stage, SimTime extra) { watchdog_ = Watchdog{state_, stage, now + base + extra}; };
  switch (state_) {
    case CellState::CaptureFrame: set("capture", 0); break;
    case CellState::Detecting: set("detect", 0); break;
    case CellState::SelectingObject: set("select", 0); break;
    case CellState::PlanningGrasp: set("grasp", 0); break;
    case CellState::MovingToGrasp: set("move", seconds(expected_motion_s_)); break;
    case CellState::Closing: set("close", seconds(cfg_.motion.grip_close_s)); break;
    case CellState::Transporting: set("transport", seconds(expected_motion_s_)); break;
    case CellState::Placing: set("place", seconds(cfg_.motion.grip_open_s)); break;
    default: watchdog_.reset(); break;
  }
}

}  // namespace pickcell::controller

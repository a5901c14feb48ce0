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

#include "harness/episode.hpp"

#include <algorithm>
#include <cmath>

#include "bus/codec.hpp"
#include "common/error.hpp"
#include "common/png_io.hpp"
#include "perception/overlay.hpp"
#include "sim/render.hpp"

namespace pickcell::harness {

namespace {

constexpr SimTime ms(double v) { return static_cast<SimTime>(std::llround(v * bus::kUsPerMs)); }
constexpr SimTime secs(double v) { return static_cast<SimTime>(std::llround(v * 1e6)); }
constexpr SimTime kTimeCap = secs(6 * 3600.0);

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a * 0x9e3779b97f4a7c15ull + b + 0x632be59bd9b4e019ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

Json detection_json(const perception::Detection& d) {
  return {{"box", Json::array({d.box.u_min, d.box.v_min, d.box.u_max, d.box.v_max})},
          {"label", d.class_label},
          {"confidence", d.confidence},
          {"merged", d.merged},
          {"source_ids", d.source_ids}};
}

}  // namespace

// --- simulated devices ------------------------------------------------------

/// The TM NPU analog: one job at a time, a single newest-wins pending slot.
class PerceptionService {
 public:
  PerceptionService(Episode& ep, const RunConfig& cfg, std::uint64_t seed, bool overlays)
      : ep_(ep), cfg_(cfg), seed_(seed), overlays_(overlays) {}

  void on_message(const bus::Message& m, SimTime now) {
    if (m.type == bus::MessageType::EStop) {
      current_.reset();
      pending_.reset();
      ++token_;
      return;
    }
    if (m.type != bus::MessageType::TriggerFrame) return;
    Job job;
    job.mode = m.payload.at("mode").get<std::string>();
    job.frame_id = m.payload.at("frame_id").get<std::uint64_t>();
    if (m.payload.contains("request"))
      for (const auto& [label, n] : m.payload.at("request").items()) job.request[label] = n.get<int>();
    job.detection_index = m.payload.value("detection_index", std::size_t{0});
    if (current_) {
      pending_ = std::move(job);
      return;
    }
    start(std::move(job), now);
  }

  void on_timer(std::uint64_t token, SimTime now) {
    if (!current_ || token != token_) return;
    finish(*current_);
    current_.reset();
    if (pending_) {
      Job next = std::move(*pending_);
      pending_.reset();
      start(std::move(next), now);
    }
  }

  int frames = 0;
  int missed = 0;
  std::vector<std::uint8_t> overlay_png;

 private:
  struct Job {
    std::string mode;
    std::uint64_t frame_id = 0;
    ClassCounts request;
    std::size_t detection_index = 0;
  };
  struct Frame {
    std::uint64_t id = 0;
    perception::FrameAnalysis analysis;
    std::vector<sim::GroundTruth> gt;
  };

  void start(Job job, SimTime now) {
    const TimingConfig& t = cfg_.timing;
    double cost = 0;
    if (job.mode == "capture") {
      cost = t.capture_ms + t.preprocess_ms + t.inpaint_ms;
      // The shutter fires now; later scene changes do not reach this frame.
      ++frames;
      const std::uint64_t fseed = mix(seed_, job.frame_id);
      Frame f;
      f.id = job.frame_id;
      const DepthFrame raw = sim::render_depth(ep_.scene(), cfg_.intrinsics, cfg_.camera_pose, cfg_.noise, fseed);
      f.gt = sim::render_ground_truth(ep_.scene(), cfg_.intrinsics, cfg_.camera_pose);
      perception::DetectorParams det = cfg_.detector;
      det.seed = mix(cfg_.detector.seed, seed_);
      f.analysis = perception::analyze_frame(raw, f.gt, det, job.frame_id);
      frame_ = std::move(f);
    } else if (job.mode == "detect") {
      cost = t.detect_ms;
    } else {
      cost = t.grasp_ms;
    }
    current_ = std::move(job);
    ep_.schedule_timer(now + ms(cost), "perception", ++token_);
  }

  void finish(const Job& job) {
    const bool have = frame_ && frame_->id == job.frame_id;
    if (job.mode == "capture") {
      double holes = 0;
      if (have) {
        const auto mask = frame_->analysis.raw.mask();
        holes = static_cast<double>(frame_->analysis.raw.hole_count()) / static_cast<double>(mask.size());
      }
      ep_.send("perception", "controller", bus::MessageType::FrameReady, {{"frame_id", job.frame_id}, {"hole_fraction", holes}});
    } else if (job.mode == "detect") {
      Json dets = Json::array();
      if (have) {
        const auto& detections = frame_->analysis.detections;
        for (const auto& d : detections) dets.push_back(detection_json(d));
        for (const auto& g : frame_->gt) {
          if (g.degenerate || !job.request.count(g.class_label)) continue;
          const bool seen = std::any_of(detections.begin(), detections.end(), [&](const perception::Detection& d) {
            return std::find(d.source_ids.begin(), d.source_ids.end(), g.object_id) != d.source_ids.end();
          });
          if (!seen) ++missed;
        }
      }
      ep_.send("perception", "controller", bus::MessageType::DetectionResult, {{"frame_id", job.frame_id}, {"detections", dets}});
    } else {
      Json out = {{"frame_id", job.frame_id}, {"detection_index", job.detection_index}, {"found", false}};
      if (have && job.detection_index < frame_->analysis.detections.size()) {
        const auto g = perception::plan_for_detection(frame_->analysis, job.detection_index, cfg_.gripper,
                                                      cfg_.intrinsics, cfg_.perception);
        if (g) {
          const double opening_px = cfg_.gripper.max_opening * cfg_.intrinsics.fx / g->z;
          out.update({{"found", true}, {"u", g->u}, {"v", g->v}, {"theta", g->theta}, {"z", g->z},
                      {"quality", g->quality}, {"opening_px", opening_px}, {"on_filled_hole", g->on_filled_hole}});
        }
        if (overlays_) {
          std::optional<perception::OverlayGrasp> og;
          if (g) og = perception::OverlayGrasp{g->u, g->v, g->theta, cfg_.gripper.max_opening * cfg_.intrinsics.fx / g->z};
          overlay_png = encode_png_rgb(perception::render_overlay(frame_->analysis.filled, frame_->analysis.detections,
                                                                  job.detection_index, og));
        }
      }
      ep_.send("perception", "controller", bus::MessageType::GraspResult, out);
    }
  }

  Episode& ep_;
  const RunConfig& cfg_;
  std::uint64_t seed_;
  bool overlays_;
  std::optional<Job> current_;
  std::optional<Job> pending_;
  std::uint64_t token_ = 0;
  std::optional<Frame> frame_;
};

class RobotSim {
 public:
  RobotSim(Episode& ep, const RunConfig& cfg, Vec3 home) : ep_(ep), cfg_(cfg), pos_(home) {}

  void on_message(const bus::Message& m, SimTime now) {
    if (m.type == bus::MessageType::EStop) {
      ++token_;
      moving_.reset();
      return;
    }
    if (m.type != bus::MessageType::RobotMove) return;
    const Json& p = m.payload;
    Move mv{p.at("cmd_id").get<std::uint64_t>(), p.at("kind") == "grasp",
            Vec3(p.at("x").get<double>(), p.at("y").get<double>(), p.at("z").get<double>()), p.at("yaw").get<double>()};
    const double t = mv.grasp ? controller::grasp_move_time(pos_, mv.target, cfg_.motion)
                              : controller::place_move_time(pos_, mv.target, cfg_.motion);
    moving_ = mv;
    ep_.schedule_timer(now + secs(t), "robot", ++token_);
  }

  void on_timer(std::uint64_t token) {
    if (!moving_ || token != token_) return;
    pos_ = moving_->target;
    yaw_ = moving_->yaw;
    const std::uint64_t id = moving_->cmd_id;
    moving_.reset();
    ep_.send("robot", "controller", bus::MessageType::RobotStatus,
             {{"cmd_id", id}, {"state", "done"}, {"x", pos_.x()}, {"y", pos_.y()}, {"z", pos_.z()}});
  }

  const Vec3& position() const { return pos_; }
  double yaw() const { return yaw_; }

 private:
  struct Move {
    std::uint64_t cmd_id;
    bool grasp;
    Vec3 target;
    double yaw;
  };
  Episode& ep_;
  const RunConfig& cfg_;
  Vec3 pos_;
  double yaw_ = 0;
  std::optional<Move> moving_;
  std::uint64_t token_ = 0;
};

class GripperSim {
 public:
  GripperSim(Episode& ep, const RunConfig& cfg, const RobotSim& robot, std::uint64_t seed)
      : ep_(ep), cfg_(cfg), robot_(robot), rng_(make_rng({seed, 0x5119})) {}

  void on_message(const bus::Message& m, SimTime now) {
    if (m.type == bus::MessageType::EStop) {
      ++token_;
      cmd_.reset();
      return;
    }
    if (m.type != bus::MessageType::GripperCmd) return;
    Cmd c{m.payload.at("cmd_id").get<std::uint64_t>(), m.payload.at("action") == "close"};
    cmd_ = c;
    ep_.schedule_timer(now + secs(c.close ? cfg_.motion.grip_close_s : cfg_.motion.grip_open_s), "gripper", ++token_);
  }

  void on_timer(std::uint64_t token, SimTime now) {
    if (!cmd_ || token != token_) return;
    const Cmd c = *cmd_;
    cmd_.reset();
    if (!c.close) {
      ep_.send("gripper", "controller", bus::MessageType::GripperStatus,
               {{"cmd_id", c.id}, {"action", "open"}, {"width", cfg_.gripper.max_opening}});
      return;
    }
    const Vec3& p = robot_.position();
    sim::WorldGrasp wg{p.x(), p.y(), p.z(), robot_.yaw()};
    sim::AdjudicationParams adj;
    adj.width_margin = cfg_.adjudication.width_margin_mm / 1000.0;
    adj.clearance = cfg_.adjudication.clearance_mm / 1000.0;
    PickRecord rec;
    sim::GraspOutcome outcome;
    std::map<int, std::string> labels;
    for (const auto& o : ep_.scene().objects) labels[o.id] = o.class_label;
    try {
      outcome = sim::apply_grasp(ep_.scene_mut(), wg, cfg_.gripper, cfg_.adjudication.slip_rate, rng_, adj);
      if (!outcome.success) rec.outcome_reason = sim::to_string(*outcome.failure_reason);
    } catch (const Error& e) {
      ep_.add_fault(std::string("gripper: ") + e.what());
      rec.outcome_reason = to_string(e.code());
    }
    if (const auto& g = ep_.controller().active_grasp()) {
      rec.frame_id = g->frame_id;
      rec.class_label = g->class_label;
      rec.u = g->u;
      rec.v = g->v;
      rec.theta = g->theta;
      rec.z = g->z;
      rec.quality = g->quality;
      rec.on_filled_hole = g->on_filled_hole;
      rec.merged = g->merged;
    }
    rec.x = wg.x;
    rec.y = wg.y;
    rec.height = wg.z;
    rec.yaw = wg.yaw;
    rec.success = outcome.success;
    rec.removed_object_id = outcome.removed_object_id;
    rec.target_object_id = outcome.target_object_id;
    if (outcome.removed_object_id) rec.removed_class = labels[*outcome.removed_object_id];
    rec.closed_at_ms = static_cast<double>(now) / bus::kUsPerMs;
    ep_.record_pick(std::move(rec));
    // Jaws that hold nothing close fully.
    const double width = outcome.success ? outcome.measured_width : 0.0;
    ep_.send("gripper", "controller", bus::MessageType::GripperStatus, {{"cmd_id", c.id}, {"action", "close"}, {"width", width}});
  }

 private:
  struct Cmd {
    std::uint64_t id;
    bool close;
  };
  Episode& ep_;
  const RunConfig& cfg_;
  const RobotSim& robot_;
  Rng rng_;
  std::optional<Cmd> cmd_;
  std::uint64_t token_ = 0;
};

// --- episode ----------------------------------------------------------------

controller::ControllerConfig make_controller_config(const RunConfig& cfg) {
  controller::ControllerConfig c;
  c.dfa.n_frames = cfg.controller.n_frames;
  c.dfa.empty_closure = cfg.controller.empty_closure_mm / 1000.0;
  c.dfa.max_consecutive_timeouts = cfg.controller.max_consecutive_timeouts;
  c.scan_ms = cfg.timing.scan_ms;
  c.queue_capacity = cfg.controller.queue_capacity;
  c.stage_timeout_ms = cfg.timing.stage_timeout_ms;
  c.select_ms = cfg.timing.select_ms;
  c.camera = cfg.intrinsics;
  c.extrinsics = cfg.extrinsics;
  c.motion = cfg.motion;
  const sim::BinDims bin;
  c.place_point = Vec3(bin.length / 2, bin.width / 2 - cfg.bins.distance(), cfg.bins.drop_height);
  c.home = c.place_point;
  return c;
}

Episode::Episode(const RunConfig& cfg, std::uint64_t seed, EpisodeOptions opts)
    : cfg_(cfg), seed_(seed), opts_(opts), router_(cfg.bus.link, seed) {
  cfg_.validate();
  scene_ = sim::generate_bin(mix(cfg_.scene.seed, seed), resolve_catalog(cfg_), cfg_.scene.count, cfg_.scene.packing, cfg_.gripper);
  router_.enable_capture(opts_.capture_bus);
  controller_ = std::make_unique<controller::Controller>(make_controller_config(cfg_));
  perception_ = std::make_unique<PerceptionService>(*this, cfg_, seed, opts_.render_overlays);
  robot_ = std::make_unique<RobotSim>(*this, cfg_, controller_->config().home);
  gripper_ = std::make_unique<GripperSim>(*this, cfg_, *robot_, seed);
  const SimTime period = ms(cfg_.bus.heartbeat_ms);
  for (const char* c : {"perception", "robot", "gripper"}) {
    monitor_.expect(c, period, 0);
    push(0, Beat{c});
  }
  push(period, BeatCheck{});
}

Episode::~Episode() = default;

sim::Scene& Episode::scene_mut() { return scene_; }

int Episode::missed_detections() const { return perception_->missed; }
int Episode::frames() const { return perception_->frames; }
const std::vector<std::uint8_t>& Episode::latest_overlay_png() const { return perception_->overlay_png; }

std::vector<std::string> Episode::faults() const {
  std::vector<std::string> out = faults_;
  for (const auto& f : controller_->faults()) out.push_back("controller: " + f);
  return out;
}

void Episode::push(SimTime t, Payload p) { queue_.push(Item{t, order_++, std::move(p)}); }

void Episode::send(const std::string& from, const std::string& to, bus::MessageType type, Json payload) {
  bus::Envelope env = router_.send(from, to, type, std::move(payload), now_);
  const SimTime at = env.deliver_at;
  push(at, Deliver{std::move(env)});
}

void Episode::inject(const std::string& from, const std::string& to, bus::MessageType type, Json payload) {
  send(from, to, type, std::move(payload));
}

bool Episode::post_default_request() {
  request_ = cfg_.scene.request;
  if (request_.empty())
    for (const auto& o : scene_.objects) ++request_[o.class_label];
  if (request_.empty()) {
    termination_ = "NothingRequested";
    return false;
  }
  Json req = Json::object();
  int total = 0;
  for (const auto& [label, n] : request_) {
    req[label] = n;
    total += n;
  }
  pick_cap_ = cfg_.pick_cap_factor * total;
  frame_cap_ = 10 * total + 10;
  request_posted_ = true;
  inject("hmi", "controller", bus::MessageType::PickRequest, {{"request", req}});
  return true;
}

void Episode::schedule_timer(SimTime at, const std::string& component, std::uint64_t token) {
  push(at, Timer{component, token});
}

void Episode::record_pick(PickRecord r) {
  r.index = static_cast<int>(picks_.size());
  picks_.push_back(std::move(r));
}

void Episode::schedule_scan(SimTime at) {
  const SimTime period = ms(cfg_.timing.scan_ms);
  const SimTime tick = ((std::max(at, now_) + period - 1) / period) * period;
  if (!scans_.insert(tick).second) return;
  push(tick, Scan{});
}

bool Episode::step() {
  if (queue_.empty()) return false;
  Item item = queue_.top();
  queue_.pop();
  now_ = item.t;
  handle(item);
  return true;
}

void Episode::advance_to(SimTime t) {
  while (!queue_.empty() && queue_.top().t <= t) step();
  now_ = std::max(now_, t);
}

std::string Episode::run() {
  if (!request_posted_ && !termination_) post_default_request();
  while (!termination_ && step()) {
  }
  if (!termination_) termination_ = "Stalled";
  drain_hmi();
  return *termination_;
}

void Episode::drain_hmi() {
  // Frames already on the wire to the HMI still arrive; nothing else runs.
  while (!queue_.empty()) {
    Item item = queue_.top();
    queue_.pop();
    if (auto* d = std::get_if<Deliver>(&item.what); d && d->env.to == "hmi") {
      now_ = std::max(now_, item.t);
      handle(item);
    }
  }
}

void Episode::handle(Item& item) {
  std::visit(
      [&](auto& w) {
        using T = std::decay_t<decltype(w)>;
        if constexpr (std::is_same_v<T, Deliver>) {
          router_.record_delivery(w.env);
          // Receivers only ever see what survives the wire format.
          const auto bytes = bus::encode_frame(w.env.message);
          const auto decoded = bus::decode_frame(bytes);
          if (decoded.status != bus::DecodeStatus::Ok) {
            add_fault("bus: " + decoded.error);
            return;
          }
          const bus::Message& m = *decoded.message;
          const std::string& to = w.env.to;
          if (to == "controller") {
            if (m.type == bus::MessageType::Heartbeat) {
              monitor_.beat(w.env.from, now_);
            } else {
              controller_->ingest(m);
              schedule_scan(now_);
            }
          } else if (to == "perception") {
            perception_->on_message(m, now_);
          } else if (to == "robot") {
            robot_->on_message(m, now_);
          } else if (to == "gripper") {
            gripper_->on_message(m, now_);
          } else if (to == "hmi") {
            if (hmi_sink_) hmi_sink_(w.env);
          }
        } else if constexpr (std::is_same_v<T, Local>) {
          controller_->push(w.event);
          schedule_scan(now_);
        } else if constexpr (std::is_same_v<T, Timer>) {
          if (w.component == "perception")
            perception_->on_timer(w.token, now_);
          else if (w.component == "robot")
            robot_->on_timer(w.token);
          else if (w.component == "gripper")
            gripper_->on_timer(w.token, now_);
        } else if constexpr (std::is_same_v<T, Beat>) {
          if (!muted_.count(w.component))
            send(w.component, "controller", bus::MessageType::Heartbeat,
                 {{"component", w.component}, {"period_ms", cfg_.bus.heartbeat_ms}});
          push(now_ + ms(cfg_.bus.heartbeat_ms), Beat{w.component});
        } else if constexpr (std::is_same_v<T, BeatCheck>) {
          for (const auto& silent : monitor_.check(now_)) {
            controller::CellEvent e = controller::CellEvent::of(controller::EventKind::Timeout);
            e.stage = "heartbeat:" + silent;
            controller_->push(std::move(e));
            schedule_scan(now_);
          }
          push(now_ + ms(cfg_.bus.heartbeat_ms), BeatCheck{});
        } else if constexpr (std::is_same_v<T, Scan>) {
          scans_.erase(item.t);
          run_scan();
        }
      },
      item.what);
}

void Episode::run_scan() {
  auto res = controller_->scan(now_);
  for (auto& t : res.transitions) {
    for (auto a : t.actions)
      if (a == controller::Action::AcceptRequest) request_active_ = true;
    log_.push_back(std::move(t));
  }
  for (auto& m : res.outbox) send("controller", m.to, m.type, std::move(m.payload));
  for (auto& l : res.local) push(now_ + l.delay, Local{std::move(l.event)});
  if (controller_->pending() > 0) schedule_scan(now_ + 1);
  if (auto wd = controller_->watchdog_deadline()) schedule_scan(*wd);
  check_termination();
}

void Episode::check_termination() {
  if (!opts_.stop_when_finished || termination_) return;
  using controller::CellState;
  const CellState s = controller_->state();
  if (s == CellState::Halted) {
    termination_ = "Halted";
    return;
  }
  if (!request_active_) return;
  if (s == CellState::Done || s == CellState::ReportingUnavailable) {
    termination_ = controller::to_string(s);
  } else if (static_cast<int>(picks_.size()) >= pick_cap_ && s == CellState::CaptureFrame) {
    termination_ = "PickCap";
  } else if (perception_->frames > frame_cap_) {
    termination_ = "FrameCap";
  } else if (now_ > kTimeCap) {
    termination_ = "TimeCap";
  }
}

}  // namespace pickcell::harness

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

#include "harness/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "common/error.hpp"

namespace pickcell::harness {

namespace {

// Strict reader over one JSON object: tracks which keys were consumed so the
// leftovers can be reported as unknown.
class Reader {
 public:
  Reader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(ErrorCode::ParseError, path_ + ": expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  void num(const std::string& key, double& out) {
    if (const Json* v = take(key)) {
      if (!v->is_number()) type_error(key, "a number");
      out = v->get<double>();
    }
  }
  template <typename I>
  void integer(const std::string& key, I& out) {
    if (const Json* v = take(key)) {
      if (!v->is_number_integer()) type_error(key, "an integer");
      if constexpr (std::is_unsigned_v<I>) {
        if (v->is_number_unsigned())
          out = static_cast<I>(v->get<std::uint64_t>());
        else if (v->get<std::int64_t>() >= 0)
          out = static_cast<I>(v->get<std::int64_t>());
        else
          type_error(key, "a non-negative integer");
      } else {
        out = static_cast<I>(v->get<std::int64_t>());
      }
    }
  }
  void boolean(const std::string& key, bool& out) {
    if (const Json* v = take(key)) {
      if (!v->is_boolean()) type_error(key, "a boolean");
      out = v->get<bool>();
    }
  }
  void str(const std::string& key, std::string& out) {
    if (const Json* v = take(key)) {
      if (!v->is_string()) type_error(key, "a string");
      out = v->get<std::string>();
    }
  }
  const Json* raw(const std::string& key) { return take(key); }
  std::optional<Reader> child(const std::string& key) {
    if (const Json* v = take(key)) return Reader(*v, at(key));
    return std::nullopt;
  }
  std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    for (const auto& [key, value] : j_.items())
      if (!used_.count(key)) fail(ErrorCode::UnknownKey, "unknown key " + at(key));
  }

  [[noreturn]] void type_error(const std::string& key, const char* what) const {
    fail(ErrorCode::ParseError, "field " + at(key) + ": expected " + what);
  }

 private:
  const Json* take(const std::string& key) {
    if (!j_.contains(key)) return nullptr;
    used_.insert(key);
    return &j_.at(key);
  }

  const Json& j_;
  std::string path_;
  std::set<std::string> used_;
};

Json vec3_json(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

Vec3 vec3_from(const Json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3) fail(ErrorCode::ParseError, "field " + where + ": expected three numbers");
  Vec3 out;
  for (int i = 0; i < 3; ++i) {
    if (!j[i].is_number()) fail(ErrorCode::ParseError, "field " + where + ": expected three numbers");
    out[i] = j[i].get<double>();
  }
  return out;
}

void check(bool ok, const std::string& what) {
  if (!ok) fail(ErrorCode::ValidationError, what);
}

}  // namespace

const char* to_string(Placement p) { return p == Placement::Near ? "near" : "far"; }

void RunConfig::validate() const {
  check(scene.count >= 0, "scene.count must be non-negative");
  for (const auto& [label, n] : scene.request) check(n > 0, "scene.request." + label + " must be positive");
  const auto labels = sim::catalog_labels(resolve_catalog(*this));
  for (const auto& [label, n] : scene.request)
    check(std::find(labels.begin(), labels.end(), label) != labels.end(), "scene.request: unknown class " + label);
  noise.validate();
  detector.validate();
  perception.validate();
  gripper.validate();
  intrinsics.validate();
  check(camera_pose.height > 0, "camera_pose.height must be positive");
  extrinsics.validate();
  motion.validate();
  for (auto [name, v] : {std::pair{"capture_ms", timing.capture_ms}, {"preprocess_ms", timing.preprocess_ms},
                         {"inpaint_ms", timing.inpaint_ms}, {"detect_ms", timing.detect_ms},
                         {"select_ms", timing.select_ms}, {"grasp_ms", timing.grasp_ms}})
    check(v >= 0, std::string("timing.") + name + " must be non-negative");
  check(timing.scan_ms >= 1, "timing.scan_ms must be at least 1");
  check(timing.stage_timeout_ms >= 1, "timing.stage_timeout_ms must be at least 1");
  bus.link.validate();
  check(bus.heartbeat_ms >= 1, "bus.heartbeat_ms must be at least 1");
  check(bins.near_distance > 0 && bins.far_distance > 0, "bins distances must be positive");
  check(bins.drop_height >= 0, "bins.drop_height must be non-negative");
  check(controller.n_frames >= 1, "controller.n_frames must be at least 1");
  check(controller.empty_closure_mm > 0, "controller.empty_closure_mm must be positive");
  check(controller.queue_capacity >= 1, "controller.queue_capacity must be at least 1");
  check(controller.max_consecutive_timeouts >= 1, "controller.max_consecutive_timeouts must be at least 1");
  check(adjudication.slip_rate >= 0 && adjudication.slip_rate <= 1, "adjudication.slip_rate must lie in [0, 1]");
  check(adjudication.width_margin_mm >= 0 && adjudication.clearance_mm >= 0, "adjudication margins must be non-negative");
  check(episodes >= 1, "episodes must be at least 1");
  check(pick_cap_factor >= 1, "pick_cap_factor must be at least 1");
}

Json RunConfig::to_json() const {
  Json miss = Json::array();
  for (const auto& p : detector.miss_curve) miss.push_back(Json::array({p.occlusion, p.probability}));
  Json request = Json::object();
  for (const auto& [label, n] : scene.request) request[label] = n;
  Json ext;
  if (extrinsics_from_pose) {
    ext = {{"from_pose", true}};
  } else {
    Json rot = Json::array();
    for (int r = 0; r < 3; ++r) rot.push_back(Json::array({extrinsics.rotation(r, 0), extrinsics.rotation(r, 1), extrinsics.rotation(r, 2)}));
    ext = {{"from_pose", false}, {"rotation", rot}, {"translation", vec3_json(extrinsics.translation)}};
  }
  return {
      {"scene", {{"catalog", scene.catalog}, {"count", scene.count}, {"packing", sim::to_string(scene.packing)},
                 {"seed", scene.seed}, {"request", request}}},
      {"noise", {{"sigma_base", noise.sigma_base}, {"grid_pitch", noise.grid_pitch}, {"hole_rate", noise.hole_rate},
                 {"hole_blob_radius", noise.hole_blob_radius}, {"edge_hole_boost", noise.edge_hole_boost}}},
      {"detector", {{"miss_curve", miss}, {"jitter_sigma", detector.jitter_sigma},
                    {"merge_iou_threshold", detector.merge_iou_threshold}, {"seed", detector.seed},
                    {"confidence", {{"base", detector.confidence.base},
                                    {"occlusion_penalty", detector.confidence.occlusion_penalty},
                                    {"jitter_penalty", detector.confidence.jitter_penalty},
                                    {"floor", detector.confidence.floor}}}}},
      {"perception", {{"crop_size", perception.crop_size}, {"crop_pad", perception.crop_pad},
                      {"grasp", {{"edge_threshold", perception.grasp.edge_threshold}, {"margin", perception.grasp.margin},
                                 {"friction_coef", perception.grasp.friction_coef}, {"stride", perception.grasp.stride},
                                 {"angular_bins", perception.grasp.angular_bins}}}}},
      {"gripper", {{"max_opening", gripper.max_opening}, {"jaw_thickness", gripper.jaw_thickness},
                   {"jaw_width", gripper.jaw_width}, {"insertion_depth", gripper.insertion_depth}}},
      {"intrinsics", {{"fx", intrinsics.fx}, {"fy", intrinsics.fy}, {"cx", intrinsics.cx}, {"cy", intrinsics.cy},
                      {"width", intrinsics.width}, {"height", intrinsics.height}, {"id", intrinsics.id}}},
      {"camera_pose", {{"x", camera_pose.x}, {"y", camera_pose.y}, {"height", camera_pose.height}}},
      {"extrinsics", ext},
      {"motion", {{"max_speed", motion.max_speed}, {"accel", motion.accel}, {"grip_close_s", motion.grip_close_s},
                  {"grip_open_s", motion.grip_open_s}, {"settle_s", motion.settle_s},
                  {"approach_height", motion.approach_height}}},
      {"timing", {{"capture_ms", timing.capture_ms}, {"preprocess_ms", timing.preprocess_ms},
                  {"inpaint_ms", timing.inpaint_ms}, {"detect_ms", timing.detect_ms}, {"select_ms", timing.select_ms},
                  {"grasp_ms", timing.grasp_ms}, {"scan_ms", timing.scan_ms},
                  {"stage_timeout_ms", timing.stage_timeout_ms}}},
      {"bus", {{"latency_ms", bus.link.latency_ms}, {"jitter_ms", bus.link.jitter_ms}, {"heartbeat_ms", bus.heartbeat_ms}}},
      {"bins", {{"placement", to_string(bins.placement)}, {"near_distance", bins.near_distance},
                {"far_distance", bins.far_distance}, {"drop_height", bins.drop_height}}},
      {"controller", {{"n_frames", controller.n_frames}, {"empty_closure_mm", controller.empty_closure_mm},
                      {"queue_capacity", controller.queue_capacity},
                      {"max_consecutive_timeouts", controller.max_consecutive_timeouts}}},
      {"adjudication", {{"slip_rate", adjudication.slip_rate}, {"width_margin_mm", adjudication.width_margin_mm},
                        {"clearance_mm", adjudication.clearance_mm}}},
      {"episodes", episodes},
      {"pick_cap_factor", pick_cap_factor},
  };
}

RunConfig RunConfig::from_json(const Json& j) {
  RunConfig c;
  Reader root(j, "");
  if (auto r = root.child("scene")) {
    if (const Json* cat = r->raw("catalog")) {
      if (!cat->is_array()) r->type_error("catalog", "a list of class labels");
      c.scene.catalog.clear();
      for (const auto& x : *cat) {
        if (!x.is_string()) r->type_error("catalog", "a list of class labels");
        c.scene.catalog.push_back(x.get<std::string>());
      }
    }
    r->integer("count", c.scene.count);
    std::string packing = sim::to_string(c.scene.packing);
    r->str("packing", packing);
    try {
      c.scene.packing = sim::packing_from_string(packing);
    } catch (const Error&) {
      fail(ErrorCode::ValidationError, "scene.packing must be Light or Dense");
    }
    r->integer("seed", c.scene.seed);
    if (const Json* req = r->raw("request")) {
      if (!req->is_object()) r->type_error("request", "an object of class counts");
      for (const auto& [label, n] : req->items()) {
        if (!n.is_number_integer()) r->type_error("request." + label, "an integer");
        c.scene.request[label] = n.get<int>();
      }
    }
    r->finish();
  }
  if (auto r = root.child("noise")) {
    r->num("sigma_base", c.noise.sigma_base);
    r->integer("grid_pitch", c.noise.grid_pitch);
    r->num("hole_rate", c.noise.hole_rate);
    r->integer("hole_blob_radius", c.noise.hole_blob_radius);
    r->num("edge_hole_boost", c.noise.edge_hole_boost);
    r->finish();
  }
  if (auto r = root.child("detector")) {
    if (const Json* mc = r->raw("miss_curve")) {
      if (!mc->is_array()) r->type_error("miss_curve", "a list of [occlusion, probability] pairs");
      c.detector.miss_curve.clear();
      for (const auto& p : *mc) {
        if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
          r->type_error("miss_curve", "a list of [occlusion, probability] pairs");
        c.detector.miss_curve.push_back({p[0].get<double>(), p[1].get<double>()});
      }
    }
    r->num("jitter_sigma", c.detector.jitter_sigma);
    r->num("merge_iou_threshold", c.detector.merge_iou_threshold);
    r->integer("seed", c.detector.seed);
    if (auto cm = r->child("confidence")) {
      cm->num("base", c.detector.confidence.base);
      cm->num("occlusion_penalty", c.detector.confidence.occlusion_penalty);
      cm->num("jitter_penalty", c.detector.confidence.jitter_penalty);
      cm->num("floor", c.detector.confidence.floor);
      cm->finish();
    }
    r->finish();
  }
  if (auto r = root.child("perception")) {
    r->integer("crop_size", c.perception.crop_size);
    r->integer("crop_pad", c.perception.crop_pad);
    if (auto g = r->child("grasp")) {
      g->num("edge_threshold", c.perception.grasp.edge_threshold);
      g->num("margin", c.perception.grasp.margin);
      g->num("friction_coef", c.perception.grasp.friction_coef);
      g->integer("stride", c.perception.grasp.stride);
      g->integer("angular_bins", c.perception.grasp.angular_bins);
      g->finish();
    }
    r->finish();
  }
  if (auto r = root.child("gripper")) {
    r->num("max_opening", c.gripper.max_opening);
    r->num("jaw_thickness", c.gripper.jaw_thickness);
    r->num("jaw_width", c.gripper.jaw_width);
    r->num("insertion_depth", c.gripper.insertion_depth);
    r->finish();
  }
  if (auto r = root.child("intrinsics")) {
    r->num("fx", c.intrinsics.fx);
    r->num("fy", c.intrinsics.fy);
    r->num("cx", c.intrinsics.cx);
    r->num("cy", c.intrinsics.cy);
    r->integer("width", c.intrinsics.width);
    r->integer("height", c.intrinsics.height);
    r->str("id", c.intrinsics.id);
    r->finish();
  }
  if (auto r = root.child("camera_pose")) {
    r->num("x", c.camera_pose.x);
    r->num("y", c.camera_pose.y);
    r->num("height", c.camera_pose.height);
    r->finish();
  }
  if (auto r = root.child("extrinsics")) {
    r->boolean("from_pose", c.extrinsics_from_pose);
    const Json* rot = r->raw("rotation");
    const Json* tr = r->raw("translation");
    if (!c.extrinsics_from_pose) {
      if (!rot || !tr) fail(ErrorCode::ValidationError, "extrinsics needs rotation and translation unless from_pose");
      if (!rot->is_array() || rot->size() != 3) r->type_error("rotation", "a 3x3 matrix");
      for (int i = 0; i < 3; ++i) c.extrinsics.rotation.row(i) = vec3_from((*rot)[i], r->at("rotation")).transpose();
      c.extrinsics.translation = vec3_from(*tr, r->at("translation"));
    } else if (rot || tr) {
      fail(ErrorCode::ValidationError, "extrinsics rotation/translation given while from_pose is true");
    }
    r->finish();
  }
  if (auto r = root.child("motion")) {
    r->num("max_speed", c.motion.max_speed);
    r->num("accel", c.motion.accel);
    r->num("grip_close_s", c.motion.grip_close_s);
    r->num("grip_open_s", c.motion.grip_open_s);
    r->num("settle_s", c.motion.settle_s);
    r->num("approach_height", c.motion.approach_height);
    r->finish();
  }
  if (auto r = root.child("timing")) {
    r->integer("capture_ms", c.timing.capture_ms);
    r->integer("preprocess_ms", c.timing.preprocess_ms);
    r->integer("inpaint_ms", c.timing.inpaint_ms);
    r->integer("detect_ms", c.timing.detect_ms);
    r->integer("select_ms", c.timing.select_ms);
    r->integer("grasp_ms", c.timing.grasp_ms);
    r->integer("scan_ms", c.timing.scan_ms);
    r->integer("stage_timeout_ms", c.timing.stage_timeout_ms);
    r->finish();
  }
  if (auto r = root.child("bus")) {
    r->num("latency_ms", c.bus.link.latency_ms);
    r->num("jitter_ms", c.bus.link.jitter_ms);
    r->integer("heartbeat_ms", c.bus.heartbeat_ms);
    r->finish();
  }
  if (auto r = root.child("bins")) {
    std::string placement = to_string(c.bins.placement);
    r->str("placement", placement);
    if (placement == "near")
      c.bins.placement = Placement::Near;
    else if (placement == "far")
      c.bins.placement = Placement::Far;
    else
      fail(ErrorCode::ValidationError, "bins.placement must be near or far");
    r->num("near_distance", c.bins.near_distance);
    r->num("far_distance", c.bins.far_distance);
    r->num("drop_height", c.bins.drop_height);
    r->finish();
  }
  if (auto r = root.child("controller")) {
    r->integer("n_frames", c.controller.n_frames);
    r->num("empty_closure_mm", c.controller.empty_closure_mm);
    r->integer("queue_capacity", c.controller.queue_capacity);
    r->integer("max_consecutive_timeouts", c.controller.max_consecutive_timeouts);
    r->finish();
  }
  if (auto r = root.child("adjudication")) {
    r->num("slip_rate", c.adjudication.slip_rate);
    r->num("width_margin_mm", c.adjudication.width_margin_mm);
    r->num("clearance_mm", c.adjudication.clearance_mm);
    r->finish();
  }
  root.integer("episodes", c.episodes);
  root.integer("pick_cap_factor", c.pick_cap_factor);
  root.finish();
  if (c.extrinsics_from_pose) c.extrinsics = controller::Extrinsics::from_pose(c.camera_pose);
  c.validate();
  return c;
}

RunConfig parse_config(const std::string& text) {
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
    RunConfig c;
    c.validate();
    return c;
  }
  Json j;
  try {
    j = Json::parse(text, nullptr, true, true);
  } catch (const Json::parse_error& e) {
    const std::size_t upto = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    int line = 1, col = 1;
    for (std::size_t i = 0; i < upto; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    fail(ErrorCode::ParseError, "line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + e.what());
  }
  return RunConfig::from_json(j);
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string dump_config(const RunConfig& cfg) { return cfg.to_json().dump(2) + "\n"; }

std::string config_hash(const RunConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : canonical_dump(cfg.to_json())) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<sim::ObjectTemplate> resolve_catalog(const RunConfig& cfg) {
  auto all = sim::default_catalog();
  if (cfg.scene.catalog.empty()) return all;
  std::vector<sim::ObjectTemplate> out;
  for (const auto& label : cfg.scene.catalog) {
    auto it = std::find_if(all.begin(), all.end(), [&](const auto& t) { return t.class_label == label; });
    if (it == all.end()) fail(ErrorCode::ValidationError, "scene.catalog: unknown class " + label);
    out.push_back(*it);
  }
  return out;
}

}  // namespace pickcell::harness

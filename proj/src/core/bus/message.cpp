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

#include "bus/message.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <set>

#include "common/error.hpp"

namespace pickcell::bus {

namespace {

const std::vector<TypeInfo> kRegistry = {
    {MessageType::PickRequest, "PickRequest", 1},   {MessageType::TriggerFrame, "TriggerFrame", 1},
    {MessageType::FrameReady, "FrameReady", 1},     {MessageType::DetectionResult, "DetectionResult", 1},
    {MessageType::GraspResult, "GraspResult", 1},   {MessageType::RobotMove, "RobotMove", 1},
    {MessageType::RobotStatus, "RobotStatus", 1},   {MessageType::GripperCmd, "GripperCmd", 1},
    {MessageType::GripperStatus, "GripperStatus", 1}, {MessageType::EStop, "EStop", 1},
    {MessageType::Heartbeat, "Heartbeat", 1},       {MessageType::HmiEvent, "HmiEvent", 1},
};

enum class Kind { Uint, Number, String, Bool, Object, Any };

struct Field {
  Kind kind;
  bool required;
  std::set<std::string> choices{};            // allowed string values, empty = any
  std::function<void(const Json&, const std::string&)> check{};
};

using Schema = std::map<std::string, Field>;

[[noreturn]] void violation(const std::string& where, const std::string& what) {
  fail(ErrorCode::SchemaViolation, where + ": " + what);
}

void check_kind(const Json& v, Kind k, const std::string& where) {
  switch (k) {
    case Kind::Uint:
      if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
        violation(where, "expected a non-negative integer");
      break;
    case Kind::Number:
      if (!v.is_number()) violation(where, "expected a number");
      if (!std::isfinite(v.get<double>())) violation(where, "expected a finite number");
      break;
    case Kind::String:
      if (!v.is_string()) violation(where, "expected a string");
      break;
    case Kind::Bool:
      if (!v.is_boolean()) violation(where, "expected a boolean");
      break;
    case Kind::Object:
      if (!v.is_object()) violation(where, "expected an object");
      break;
    case Kind::Any:
      break;
  }
}

void check_object(const Json& j, const Schema& schema, const std::string& where) {
  if (!j.is_object()) violation(where, "payload must be an object");
  for (const auto& [key, value] : j.items())
    if (!schema.count(key)) violation(where + "." + key, "unknown field");
  for (const auto& [key, field] : schema) {
    const std::string at = where + "." + key;
    if (!j.contains(key)) {
      if (field.required) violation(at, "missing");
      continue;
    }
    const Json& v = j.at(key);
    check_kind(v, field.kind, at);
    if (!field.choices.empty() && !field.choices.count(v.get<std::string>())) violation(at, "unexpected value");
    if (field.check) field.check(v, at);
  }
}

void counts_map(const Json& v, const std::string& where, bool positive) {
  for (const auto& [label, count] : v.items()) {
    if (label.empty()) violation(where, "empty class label");
    if (!count.is_number_integer()) violation(where + "." + label, "count must be an integer");
    const auto n = count.get<std::int64_t>();
    if (positive ? n <= 0 : n < 0) violation(where + "." + label, "count out of range");
  }
}

void detection_list(const Json& v, const std::string& where) {
  if (!v.is_array()) violation(where, "expected an array");
  const Schema item = {
      {"box", {Kind::Any, true, {}, [](const Json& b, const std::string& w) {
                 if (!b.is_array() || b.size() != 4) violation(w, "expected four numbers");
                 for (const auto& x : b) check_kind(x, Kind::Number, w);
                 if (!(b[0].get<double>() < b[2].get<double>() && b[1].get<double>() < b[3].get<double>()))
                   violation(w, "degenerate box");
               }}},
      {"label", {Kind::String, true}},
      {"confidence", {Kind::Number, true, {}, [](const Json& c, const std::string& w) {
                        const double x = c.get<double>();
                        if (x < 0 || x > 1) violation(w, "confidence outside [0, 1]");
                      }}},
      {"merged", {Kind::Bool, true}},
      {"source_ids", {Kind::Any, true, {}, [](const Json& ids, const std::string& w) {
                        if (!ids.is_array()) violation(w, "expected an array");
                        for (const auto& id : ids)
                          if (!id.is_number_integer()) violation(w, "expected integers");
                      }}},
  };
  for (std::size_t i = 0; i < v.size(); ++i) check_object(v[i], item, where + "[" + std::to_string(i) + "]");
}

const std::map<MessageType, Schema>& schemas() {
  static const std::map<MessageType, Schema> s = {
      {MessageType::PickRequest,
       {{"request", {Kind::Object, true, {}, [](const Json& v, const std::string& w) {
                       if (v.empty()) violation(w, "empty request");
                       counts_map(v, w, true);
                     }}}}},
      {MessageType::TriggerFrame,
       {{"mode", {Kind::String, true, {"capture", "detect", "grasp"}}},
        {"frame_id", {Kind::Uint, true}},
        {"request", {Kind::Object, false, {}, [](const Json& v, const std::string& w) { counts_map(v, w, false); }}},
        {"detection_index", {Kind::Uint, false}}}},
      {MessageType::FrameReady,
       {{"frame_id", {Kind::Uint, true}}, {"hole_fraction", {Kind::Number, true}}}},
      {MessageType::DetectionResult,
       {{"frame_id", {Kind::Uint, true}}, {"detections", {Kind::Any, true, {}, detection_list}}}},
      {MessageType::GraspResult,
       {{"frame_id", {Kind::Uint, true}},
        {"detection_index", {Kind::Uint, true}},
        {"found", {Kind::Bool, true}},
        {"u", {Kind::Number, false}},
        {"v", {Kind::Number, false}},
        {"theta", {Kind::Number, false}},
        {"z", {Kind::Number, false}},
        {"quality", {Kind::Number, false}},
        {"opening_px", {Kind::Number, false}},
        {"on_filled_hole", {Kind::Bool, false}}}},
      {MessageType::RobotMove,
       {{"cmd_id", {Kind::Uint, true}},
        {"kind", {Kind::String, true, {"grasp", "place"}}},
        {"x", {Kind::Number, true}},
        {"y", {Kind::Number, true}},
        {"z", {Kind::Number, true}},
        {"yaw", {Kind::Number, true}}}},
      {MessageType::RobotStatus,
       {{"cmd_id", {Kind::Uint, true}},
        {"state", {Kind::String, true, {"done", "stopped"}}},
        {"x", {Kind::Number, true}},
        {"y", {Kind::Number, true}},
        {"z", {Kind::Number, true}}}},
      {MessageType::GripperCmd,
       {{"cmd_id", {Kind::Uint, true}}, {"action", {Kind::String, true, {"close", "open"}}}}},
      {MessageType::GripperStatus,
       {{"cmd_id", {Kind::Uint, true}},
        {"action", {Kind::String, true, {"close", "open", "stopped"}}},
        {"width", {Kind::Number, true}}}},
      {MessageType::EStop, {}},
      {MessageType::Heartbeat, {{"component", {Kind::String, true}}, {"period_ms", {Kind::Uint, true}}}},
      {MessageType::HmiEvent, {{"kind", {Kind::String, true}}, {"data", {Kind::Any, true}}}},
  };
  return s;
}

}  // namespace

const std::vector<TypeInfo>& registry() { return kRegistry; }

std::optional<MessageType> type_from_code(std::uint8_t code) {
  for (const auto& t : kRegistry)
    if (static_cast<std::uint8_t>(t.type) == code) return t.type;
  return std::nullopt;
}

std::optional<MessageType> type_from_name(const std::string& name) {
  for (const auto& t : kRegistry)
    if (name == t.name) return t.type;
  return std::nullopt;
}

const char* to_string(MessageType t) {
  for (const auto& info : kRegistry)
    if (info.type == t) return info.name;
  return "Unknown";
}

int schema_version(MessageType t) {
  for (const auto& info : kRegistry)
    if (info.type == t) return info.schema_version;
  return 0;
}

void validate_payload(MessageType type, const Json& payload) {
  const auto it = schemas().find(type);
  if (it == schemas().end()) fail(ErrorCode::SchemaViolation, "unregistered message type");
  check_object(payload, it->second, to_string(type));
}

}  // namespace pickcell::bus

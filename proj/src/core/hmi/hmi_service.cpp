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

#include "hmi/hmi_service.hpp"

#include <algorithm>

namespace pickcell::hmi {

namespace {

bool accepts_request(const std::string& state) {
  return state == "Idle" || state == "AwaitRequest" || state == "Done" || state == "ReportingUnavailable";
}

Reply error(int status, const std::string& msg) { return {status, {{"error", msg}}}; }

}  // namespace

HmiService::HmiService(std::vector<std::string> catalog, Hooks hooks, std::size_t buffer_capacity)
    : catalog_(std::move(catalog)), hooks_(std::move(hooks)), events_(buffer_capacity) {}

void HmiService::on_bus(const bus::Message& msg) {
  if (msg.type != bus::MessageType::HmiEvent) return;
  const std::string kind = msg.payload.at("kind").get<std::string>();
  const Json& data = msg.payload.at("data");
  std::lock_guard lock(mu_);
  Json event = {{"type", kind}};
  if (kind == "transition") {
    state_ = data.at("state_to").get<std::string>();
    if (state_ == "Halted") in_flight_ = false;
    event["record"] = data;
  } else {
    event["data"] = data;
    if (kind == "request") {
      request_ = data;
      remaining_ = data;
      unavailable_.clear();
      detections_ = Json::array();
      selected_ = nullptr;
      grasp_ = nullptr;
      in_flight_ = false;
    } else if (kind == "detections") {
      detections_ = data.at("detections");
      selected_ = data.at("selected");
    } else if (kind == "grasp") {
      grasp_ = data;
      event["overlay"] = "/api/overlay/latest.png";
    } else if (kind == "picked") {
      remaining_ = data.at("remaining");
    } else if (kind == "unavailable") {
      for (const auto& c : data.at("classes")) unavailable_.insert(c.get<std::string>());
    } else if (kind == "notice") {
      remaining_ = data.at("remaining");
      for (const auto& c : data.at("unavailable")) unavailable_.insert(c.get<std::string>());
    }
  }
  events_.publish(std::move(event));
}

void HmiService::set_metrics(const harness::MetricsSummary& m) {
  std::lock_guard lock(mu_);
  metrics_ = m;
}

void HmiService::set_overlay(std::vector<std::uint8_t> png) {
  std::lock_guard lock(mu_);
  overlay_ = std::move(png);
}

Reply HmiService::handle_request(const std::string& body) {
  Json j;
  try {
    j = Json::parse(body);
  } catch (const Json::exception&) {
    return error(400, "body is not valid JSON");
  }
  // Accept either {label: n} or {"request": {label: n}}.
  if (j.is_object() && j.size() == 1 && j.contains("request") && j.at("request").is_object()) j = j.at("request");
  if (!j.is_object() || j.empty()) return error(400, "expected a non-empty object of class counts");
  ClassCounts counts;
  for (const auto& [label, n] : j.items()) {
    if (std::find(catalog_.begin(), catalog_.end(), label) == catalog_.end())
      return error(400, "unknown class label: " + label);
    if (!n.is_number_integer() || n.get<long long>() <= 0)
      return error(400, "count for " + label + " must be a positive integer");
    if (n.get<long long>() > 1000) return error(400, "count for " + label + " is too large");
    counts[label] = n.get<int>();
  }
  {
    std::lock_guard lock(mu_);
    if (in_flight_ || !accepts_request(state_))
      return error(409, "cell busy: state " + state_ + (in_flight_ ? ", request pending" : ""));
    in_flight_ = true;
  }
  if (hooks_.post_request) hooks_.post_request(counts);
  return {202, {{"accepted", true}, {"request", counts}}};
}

Reply HmiService::handle_estop() {
  if (hooks_.estop) hooks_.estop();
  return {200, {{"estop", true}}};
}

Reply HmiService::handle_reset() {
  if (hooks_.reset) hooks_.reset();
  std::lock_guard lock(mu_);
  return {200, {{"reset", true}, {"state", state_}}};
}

Json HmiService::snapshot_locked() const {
  Json grasp = grasp_;
  if (grasp.is_object()) grasp["overlay"] = "/api/overlay/latest.png";
  return {{"cell_state", state_},
          {"active_request",
           {{"request", request_},
            {"remaining", remaining_},
            {"unavailable", std::vector<std::string>(unavailable_.begin(), unavailable_.end())}}},
          {"last_detections", detections_},
          {"selected", selected_},
          {"last_grasp", grasp},
          {"unavailable", std::vector<std::string>(unavailable_.begin(), unavailable_.end())},
          {"metrics", metrics_.to_json()},
          {"seq", events_.last_seq()}};
}

Json HmiService::snapshot() const {
  std::lock_guard lock(mu_);
  return snapshot_locked();
}

Json HmiService::catalog_json() const { return {{"classes", catalog_}}; }

Json HmiService::metrics_json() const {
  std::lock_guard lock(mu_);
  return metrics_.to_json();
}

std::optional<std::vector<std::uint8_t>> HmiService::overlay() const {
  std::lock_guard lock(mu_);
  if (overlay_.empty()) return std::nullopt;
  return overlay_;
}

std::string HmiService::cell_state() const {
  std::lock_guard lock(mu_);
  return state_;
}

std::shared_ptr<Subscription> HmiService::subscribe() {
  std::lock_guard lock(mu_);
  return events_.subscribe({{"type", "snapshot"}, {"snapshot", snapshot_locked()}});
}

}  // namespace pickcell::hmi

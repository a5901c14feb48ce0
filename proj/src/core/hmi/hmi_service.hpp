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
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "bus/message.hpp"
#include "hmi/broadcaster.hpp"
#include "harness/metrics.hpp"

namespace pickcell::hmi {

/// Status code plus JSON body, transport-agnostic.
struct Reply {
  int status = 200;
  Json body;
};

/// Operator-side view of the cell, fed only by HmiEvent traffic from the bus.
/// Commands leave through the hooks; none is invoked with the state lock held.
class HmiService {
 public:
  struct Hooks {
    std::function<void(const ClassCounts&)> post_request;
    std::function<void()> estop;
    std::function<void()> reset;
  };

  HmiService(std::vector<std::string> catalog, Hooks hooks, std::size_t buffer_capacity = 256);

  /// Bus side. Non-HmiEvent messages are ignored.
  void on_bus(const bus::Message& msg);
  void set_metrics(const harness::MetricsSummary& m);
  void set_overlay(std::vector<std::uint8_t> png);

  Reply handle_request(const std::string& body);
  Reply handle_estop();
  Reply handle_reset();

  Json snapshot() const;
  Json catalog_json() const;
  Json metrics_json() const;
  std::optional<std::vector<std::uint8_t>> overlay() const;
  std::string cell_state() const;

  /// Late subscribers get a snapshot first, consistent with the sequence.
  std::shared_ptr<Subscription> subscribe();
  EventBroadcaster& broadcaster() { return events_; }

 private:
  Json snapshot_locked() const;

  std::vector<std::string> catalog_;
  Hooks hooks_;
  mutable std::mutex mu_;
  EventBroadcaster events_;

  std::string state_ = "Idle";
  Json request_ = nullptr;  // {label: count} as accepted by the controller
  Json remaining_ = Json::object();
  std::set<std::string> unavailable_;
  Json detections_ = Json::array();
  Json selected_ = nullptr;
  Json grasp_ = nullptr;
  bool in_flight_ = false;  // posted, not yet acknowledged by the controller
  harness::MetricsSummary metrics_;
  std::vector<std::uint8_t> overlay_;
};

}  // namespace pickcell::hmi

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

#include <atomic>
#include <memory>
#include <mutex>
#include <thread>

#include "harness/episode.hpp"
#include "hmi/hmi_service.hpp"

namespace pickcell::hmi {

/// A cell that never ends on its own, driven either by a pacing thread
/// (start) or by explicit advance() calls. The simulated clock runs at
/// `speed` times wall time when paced.
class LiveCell {
 public:
  LiveCell(const harness::RunConfig& cfg, std::uint64_t seed, double speed = 1.0, std::size_t buffer_capacity = 256);
  ~LiveCell();
  LiveCell(const LiveCell&) = delete;
  LiveCell& operator=(const LiveCell&) = delete;

  HmiService& hmi() { return *hmi_; }

  void start();
  void stop();
  /// Manual stepping; only while not started.
  void advance(bus::SimTime dt);
  bus::SimTime now() const;
  controller::CellState state() const;

 private:
  void advance_locked(bus::SimTime to);
  void publish_side_channels();

  mutable std::mutex mu_;
  double speed_;
  std::unique_ptr<harness::Episode> ep_;
  std::unique_ptr<HmiService> hmi_;
  std::size_t log_seen_ = 0;
  std::size_t picks_seen_ = 0;
  std::vector<std::uint8_t> overlay_seen_;
  std::atomic<bool> running_{false};
  std::thread pacer_;
};

}  // namespace pickcell::hmi

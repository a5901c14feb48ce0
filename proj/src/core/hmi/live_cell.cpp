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

#include "hmi/live_cell.hpp"

#include <chrono>

#include "common/error.hpp"
#include "sim/scene.hpp"

namespace pickcell::hmi {

LiveCell::LiveCell(const harness::RunConfig& cfg, std::uint64_t seed, double speed, std::size_t buffer_capacity)
    : speed_(speed) {
  if (!(speed > 0)) fail(ErrorCode::InvalidArgument, "speed must be positive");
  harness::EpisodeOptions opts;
  opts.render_overlays = true;
  opts.stop_when_finished = false;
  ep_ = std::make_unique<harness::Episode>(cfg, seed, opts);

  HmiService::Hooks hooks;
  hooks.post_request = [this](const ClassCounts& counts) {
    Json req = Json::object();
    for (const auto& [label, n] : counts) req[label] = n;
    std::lock_guard lock(mu_);
    ep_->inject("hmi", "controller", bus::MessageType::PickRequest, {{"request", req}});
  };
  hooks.estop = [this] {
    std::lock_guard lock(mu_);
    ep_->inject("hmi", "controller", bus::MessageType::EStop, Json::object());
  };
  hooks.reset = [this] {
    std::lock_guard lock(mu_);
    ep_->inject("hmi", "controller", bus::MessageType::HmiEvent, {{"kind", "command.reset"}, {"data", Json::object()}});
  };
  hmi_ = std::make_unique<HmiService>(sim::catalog_labels(harness::resolve_catalog(cfg)), std::move(hooks),
                                      buffer_capacity);
  ep_->set_hmi_sink([this](const bus::Envelope& env) { hmi_->on_bus(env.message); });
}

LiveCell::~LiveCell() {
  stop();
  hmi_->broadcaster().close_all();
}

void LiveCell::start() {
  if (running_.exchange(true)) return;
  pacer_ = std::thread([this] {
    using clock = std::chrono::steady_clock;
    const auto wall0 = clock::now();
    bus::SimTime sim0;
    {
      std::lock_guard lock(mu_);
      sim0 = ep_->now();
    }
    while (running_) {
      const double elapsed_us = std::chrono::duration<double, std::micro>(clock::now() - wall0).count();
      {
        std::lock_guard lock(mu_);
        advance_locked(sim0 + static_cast<bus::SimTime>(elapsed_us * speed_));
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
  });
}

void LiveCell::stop() {
  if (!running_.exchange(false)) return;
  if (pacer_.joinable()) pacer_.join();
}

void LiveCell::advance(bus::SimTime dt) {
  if (running_) fail(ErrorCode::InvalidArgument, "advance() while paced");
  std::lock_guard lock(mu_);
  advance_locked(ep_->now() + dt);
}

void LiveCell::advance_locked(bus::SimTime to) {
  ep_->advance_to(to);
  publish_side_channels();
}

void LiveCell::publish_side_channels() {
  if (ep_->transitions().size() != log_seen_ || ep_->picks().size() != picks_seen_) {
    log_seen_ = ep_->transitions().size();
    picks_seen_ = ep_->picks().size();
    hmi_->set_metrics(harness::compute_metrics(ep_->transitions(), ep_->picks(), ep_->missed_detections()));
  }
  if (ep_->latest_overlay_png() != overlay_seen_) {
    overlay_seen_ = ep_->latest_overlay_png();
    hmi_->set_overlay(overlay_seen_);
  }
}

bus::SimTime LiveCell::now() const {
  std::lock_guard lock(mu_);
  return ep_->now();
}

controller::CellState LiveCell::state() const {
  std::lock_guard lock(mu_);
  return ep_->controller().state();
}

}  // namespace pickcell::hmi

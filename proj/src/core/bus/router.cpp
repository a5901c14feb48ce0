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

#include "bus/router.hpp"

#include <algorithm>
#include <cmath>

#include "common/error.hpp"

namespace pickcell::bus {

void LinkParams::validate() const {
  if (!(latency_ms >= 0) || !(jitter_ms >= 0)) fail(ErrorCode::ValidationError, "link latency and jitter must be non-negative");
}

Router::Router(LinkParams defaults, std::uint64_t seed) : defaults_(defaults), rng_(make_rng({seed, 0xb05})) {
  defaults_.validate();
}

Router::LinkState& Router::state(const std::string& from, const std::string& to) {
  auto [it, inserted] = links_.try_emplace({from, to});
  if (inserted) it->second.params = defaults_;
  return it->second;
}

void Router::set_link(const std::string& from, const std::string& to, LinkParams params) {
  params.validate();
  state(from, to).params = params;
}

const LinkParams& Router::link(const std::string& from, const std::string& to) const {
  const auto it = links_.find({from, to});
  return it == links_.end() ? defaults_ : it->second.params;
}

Envelope Router::send(const std::string& from, const std::string& to, MessageType type, Json payload, SimTime now) {
  validate_payload(type, payload);
  Envelope env{from, to, Message{type, next_seq_[from]++, std::move(payload)}, now, now, order_++};
  if (type == MessageType::EStop) return env;
  LinkState& link = state(from, to);
  const double jitter = link.params.jitter_ms > 0 ? uniform01(rng_) * link.params.jitter_ms : 0.0;
  const SimTime delay = static_cast<SimTime>(std::llround((link.params.latency_ms + jitter) * kUsPerMs));
  env.deliver_at = std::max(now + delay, link.last_deliver);
  link.last_deliver = env.deliver_at;
  return env;
}

void Router::record_delivery(const Envelope& env) {
  if (capture_) append_dump_record(dump_, static_cast<std::uint64_t>(env.deliver_at / kUsPerMs), env.message);
}

void HeartbeatMonitor::expect(const std::string& component, SimTime period, SimTime now) {
  if (period <= 0) fail(ErrorCode::ValidationError, "heartbeat period must be positive");
  entries_[component] = {period, now, false};
}

void HeartbeatMonitor::beat(const std::string& component, SimTime now) {
  auto it = entries_.find(component);
  if (it == entries_.end()) return;
  it->second.last = now;
  it->second.reported = false;
}

std::vector<std::string> HeartbeatMonitor::check(SimTime now) {
  std::vector<std::string> out;
  for (auto& [name, e] : entries_) {
    if (!e.reported && now - e.last > missed_periods_ * e.period) {
      e.reported = true;
      out.push_back(name);
    }
  }
  return out;
}

std::optional<SimTime> HeartbeatMonitor::next_deadline() const {
  std::optional<SimTime> best;
  for (const auto& [name, e] : entries_) {
    if (e.reported) continue;
    const SimTime t = e.last + missed_periods_ * e.period + 1;
    if (!best || t < *best) best = t;
  }
  return best;
}

}  // namespace pickcell::bus

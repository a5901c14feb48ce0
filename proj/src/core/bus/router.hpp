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

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bus/codec.hpp"
#include "common/rng.hpp"

namespace pickcell::bus {

/// Simulated time in microseconds.
using SimTime = std::int64_t;
inline constexpr SimTime kUsPerMs = 1000;

struct LinkParams {
  double latency_ms = 1.0;  // calibration default
  double jitter_ms = 0.0;

  void validate() const;
  bool operator==(const LinkParams&) const = default;
};

struct Envelope {
  std::string from;
  std::string to;
  Message message;
  SimTime sent_at = 0;
  SimTime deliver_at = 0;
  std::uint64_t order = 0;  // global send order, breaks delivery-time ties
};

/// Assigns per-sender sequence numbers and delivery times. Each directed link
/// keeps FIFO order: a jittered frame never overtakes an earlier one on the
/// same link. EStop frames skip the queue and arrive at the send time.
class Router {
 public:
  explicit Router(LinkParams defaults = {}, std::uint64_t seed = 0);

  void set_link(const std::string& from, const std::string& to, LinkParams params);
  const LinkParams& link(const std::string& from, const std::string& to) const;

  /// Stamps seq and deliver_at. Throws SchemaViolation for invalid payloads.
  Envelope send(const std::string& from, const std::string& to, MessageType type, Json payload, SimTime now);

  /// Capture every delivered frame into a .busdump buffer.
  void enable_capture(bool on) { capture_ = on; }
  void record_delivery(const Envelope& env);
  const std::vector<std::uint8_t>& capture() const { return dump_; }

 private:
  using Key = std::pair<std::string, std::string>;
  struct LinkState {
    LinkParams params;
    SimTime last_deliver = 0;
  };
  LinkState& state(const std::string& from, const std::string& to);

  LinkParams defaults_;
  Rng rng_;
  std::map<Key, LinkState> links_;
  std::map<std::string, std::uint32_t> next_seq_;
  std::uint64_t order_ = 0;
  bool capture_ = false;
  std::vector<std::uint8_t> dump_;
};

/// Flags components that stay silent for more than `missed_periods` periods.
class HeartbeatMonitor {
 public:
  explicit HeartbeatMonitor(int missed_periods = 3) : missed_periods_(missed_periods) {}

  void expect(const std::string& component, SimTime period, SimTime now);
  void beat(const std::string& component, SimTime now);
  /// Components newly past the silence limit; each silence is reported once.
  std::vector<std::string> check(SimTime now);
  /// Earliest time at which check() could report something new.
  std::optional<SimTime> next_deadline() const;

 private:
  struct Entry {
    SimTime period = 0;
    SimTime last = 0;
    bool reported = false;
  };
  int missed_periods_;
  std::map<std::string, Entry> entries_;
};

}  // namespace pickcell::bus

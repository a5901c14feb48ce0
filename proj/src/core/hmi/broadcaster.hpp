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

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "common/canonical_json.hpp"

namespace pickcell::hmi {

/// One reader's bounded queue of NDJSON lines. When the writer outruns the
/// reader the oldest lines go and the reader sees a gap marker in their place.
class Subscription {
 public:
  explicit Subscription(std::size_t capacity) : capacity_(capacity) {}

  /// Next line, or nullopt after `timeout` with nothing to read (or once closed).
  std::optional<std::string> next(std::chrono::milliseconds timeout);
  /// Everything readable right now, gap markers included.
  std::vector<std::string> drain();
  void close();
  bool closed() const;

 private:
  friend class EventBroadcaster;
  void push(std::string line);
  std::optional<std::string> pop_locked();

  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::deque<std::string> lines_;
  std::size_t capacity_;
  std::uint64_t dropped_ = 0;
  bool closed_ = false;
};

/// Single producer, many consumers. Every published event gets the next
/// sequence number and reaches each live subscriber in order.
class EventBroadcaster {
 public:
  explicit EventBroadcaster(std::size_t capacity = 256);

  /// `first` (usually a snapshot) is queued ahead of any later event.
  std::shared_ptr<Subscription> subscribe(Json first);
  void unsubscribe(const std::shared_ptr<Subscription>& sub);
  /// Stamps "seq" and fans out.
  void publish(Json event);
  std::uint64_t last_seq() const;
  std::size_t subscriber_count() const;
  void close_all();

 private:
  mutable std::mutex mu_;
  std::vector<std::shared_ptr<Subscription>> subs_;
  std::size_t capacity_;
  std::uint64_t seq_ = 0;
};

}  // namespace pickcell::hmi

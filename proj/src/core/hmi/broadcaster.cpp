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

#include "hmi/broadcaster.hpp"

#include <algorithm>

#include "common/error.hpp"

namespace pickcell::hmi {

void Subscription::push(std::string line) {
  {
    std::lock_guard lock(mu_);
    if (closed_) return;
    if (lines_.size() >= capacity_) {
      lines_.pop_front();
      ++dropped_;
    }
    lines_.push_back(std::move(line));
  }
  cv_.notify_one();
}

std::optional<std::string> Subscription::pop_locked() {
  if (dropped_ > 0) {
    const Json gap = {{"type", "gap"}, {"dropped", dropped_}};
    dropped_ = 0;
    return canonical_dump(gap);
  }
  if (lines_.empty()) return std::nullopt;
  std::string line = std::move(lines_.front());
  lines_.pop_front();
  return line;
}

std::optional<std::string> Subscription::next(std::chrono::milliseconds timeout) {
  std::unique_lock lock(mu_);
  cv_.wait_for(lock, timeout, [&] { return closed_ || dropped_ > 0 || !lines_.empty(); });
  return pop_locked();
}

std::vector<std::string> Subscription::drain() {
  std::lock_guard lock(mu_);
  std::vector<std::string> out;
  while (auto l = pop_locked()) out.push_back(std::move(*l));
  return out;
}

void Subscription::close() {
  {
    std::lock_guard lock(mu_);
    closed_ = true;
  }
  cv_.notify_all();
}

bool Subscription::closed() const {
  std::lock_guard lock(mu_);
  return closed_;
}

EventBroadcaster::EventBroadcaster(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) fail(ErrorCode::InvalidArgument, "subscriber buffer capacity must be positive");
}

std::shared_ptr<Subscription> EventBroadcaster::subscribe(Json first) {
  auto sub = std::make_shared<Subscription>(capacity_);
  std::lock_guard lock(mu_);
  first["seq"] = seq_;
  sub->push(canonical_dump(first));
  subs_.push_back(sub);
  return sub;
}

void EventBroadcaster::unsubscribe(const std::shared_ptr<Subscription>& sub) {
  std::lock_guard lock(mu_);
  subs_.erase(std::remove(subs_.begin(), subs_.end(), sub), subs_.end());
  sub->close();
}

void EventBroadcaster::publish(Json event) {
  std::lock_guard lock(mu_);
  event["seq"] = ++seq_;
  const std::string line = canonical_dump(event);
  for (const auto& s : subs_) s->push(line);
}

std::uint64_t EventBroadcaster::last_seq() const {
  std::lock_guard lock(mu_);
  return seq_;
}

std::size_t EventBroadcaster::subscriber_count() const {
  std::lock_guard lock(mu_);
  return subs_.size();
}

void EventBroadcaster::close_all() {
  std::lock_guard lock(mu_);
  for (const auto& s : subs_) s->close();
  subs_.clear();
}

}  // namespace pickcell::hmi

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

#include "controller/request.hpp"

namespace pickcell::controller {

int PickRequest::total_remaining() const {
  int n = 0;
  for (const auto& [label, count] : remaining) n += count;
  return n;
}

std::set<std::string> PickRequest::actionable() const {
  std::set<std::string> out;
  for (const auto& [label, count] : remaining)
    if (count > 0 && !unavailable.count(label)) out.insert(label);
  return out;
}

namespace {
ListSignal signal_for(const PickRequest& r) {
  return r.total_remaining() == 0 ? ListSignal::ListFulfilled : ListSignal::ListOpen;
}
}  // namespace

RequestUpdate mark_verified(const PickRequest& req, const std::string& class_label) {
  RequestUpdate out{req};
  auto it = out.request.remaining.find(class_label);
  if (it != out.request.remaining.end() && it->second > 0) --it->second;
  out.signal = signal_for(out.request);
  return out;
}

RequestUpdate mark_unavailable(const PickRequest& req, const std::string& class_label) {
  RequestUpdate out{req};
  out.newly_unavailable = out.request.unavailable.insert(class_label).second;
  out.signal = signal_for(out.request);
  return out;
}

}  // namespace pickcell::controller

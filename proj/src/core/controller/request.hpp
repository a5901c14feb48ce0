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

#include <set>
#include <string>

#include "common/types.hpp"

namespace pickcell::controller {

struct PickRequest {
  ClassCounts remaining;
  std::set<std::string> unavailable;

  int total_remaining() const;
  /// Classes with a positive count that have not been reported unavailable.
  std::set<std::string> actionable() const;
  bool operator==(const PickRequest&) const = default;
};

enum class ListSignal { ListFulfilled, ListOpen };

struct RequestUpdate {
  PickRequest request;
  ListSignal signal = ListSignal::ListOpen;
  bool newly_unavailable = false;
};

RequestUpdate mark_verified(const PickRequest& req, const std::string& class_label);
RequestUpdate mark_unavailable(const PickRequest& req, const std::string& class_label);

}  // namespace pickcell::controller

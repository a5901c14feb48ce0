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
#include <optional>
#include <string>
#include <vector>

#include "common/canonical_json.hpp"

namespace pickcell::bus {

enum class MessageType : std::uint8_t {
  PickRequest = 0x01,
  TriggerFrame = 0x02,
  FrameReady = 0x03,
  DetectionResult = 0x04,
  GraspResult = 0x05,
  RobotMove = 0x06,
  RobotStatus = 0x07,
  GripperCmd = 0x08,
  GripperStatus = 0x09,
  EStop = 0x0A,
  Heartbeat = 0x0B,
  HmiEvent = 0x0C,
};

struct TypeInfo {
  MessageType type;
  const char* name;
  int schema_version;
};

/// Registered types in wire-code order.
const std::vector<TypeInfo>& registry();
std::optional<MessageType> type_from_code(std::uint8_t code);
std::optional<MessageType> type_from_name(const std::string& name);
const char* to_string(MessageType t);
int schema_version(MessageType t);

struct Message {
  MessageType type = MessageType::Heartbeat;
  std::uint32_t seq = 0;
  Json payload = Json::object();

  bool operator==(const Message& o) const {
    return type == o.type && seq == o.seq && payload == o.payload;
  }
};

/// Throws SchemaViolation naming the offending field.
void validate_payload(MessageType type, const Json& payload);

}  // namespace pickcell::bus

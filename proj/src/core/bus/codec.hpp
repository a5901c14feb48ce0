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
#include <span>
#include <string>
#include <vector>

#include "bus/message.hpp"

namespace pickcell::bus {

inline constexpr std::size_t kHeaderSize = 9;
inline constexpr std::uint32_t kMaxPayload = 1u << 20;

/// length (u32 BE) | type (u8) | seq (u32 BE) | canonical JSON payload.
/// Throws SchemaViolation for payloads that do not match the type's schema.
std::vector<std::uint8_t> encode_frame(const Message& msg);

enum class DecodeStatus { Ok, NeedMoreBytes, FrameError };

struct DecodeResult {
  DecodeStatus status = DecodeStatus::NeedMoreBytes;
  std::optional<Message> message;
  std::size_t consumed = 0;
  std::optional<std::uint32_t> seq;  // known once the header is complete
  std::string error;
};

/// Decodes the first frame in `bytes`. Never throws and never looks past the
/// declared length. A FrameError consumes the whole offending frame when its
/// extent is known, so a stream can resynchronize.
DecodeResult decode_frame(std::span<const std::uint8_t> bytes);

/// .busdump: frames with an 8-byte big-endian millisecond timestamp in front.
struct DumpRecord {
  std::uint64_t timestamp_ms = 0;
  Message message;
};

void append_dump_record(std::vector<std::uint8_t>& out, std::uint64_t timestamp_ms, const Message& msg);
/// Throws FrameError on a malformed record, naming its byte offset.
std::vector<DumpRecord> parse_dump(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> read_file_bytes(const std::string& path);
void write_file_bytes(const std::string& path, std::span<const std::uint8_t> bytes);

}  // namespace pickcell::bus

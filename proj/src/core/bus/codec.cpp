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

#include "bus/codec.hpp"

#include <fstream>
#include <iterator>

#include "common/error.hpp"

namespace pickcell::bus {

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>(v >> s));
}

std::uint32_t get_u32(std::span<const std::uint8_t> b, std::size_t at) {
  return (std::uint32_t{b[at]} << 24) | (std::uint32_t{b[at + 1]} << 16) | (std::uint32_t{b[at + 2]} << 8) |
         std::uint32_t{b[at + 3]};
}

}  // namespace

std::vector<std::uint8_t> encode_frame(const Message& msg) {
  validate_payload(msg.type, msg.payload);
  const std::string body = canonical_dump(msg.payload);
  if (body.size() > kMaxPayload) fail(ErrorCode::SchemaViolation, "payload exceeds frame limit");
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderSize + body.size());
  put_u32(out, static_cast<std::uint32_t>(body.size()));
  out.push_back(static_cast<std::uint8_t>(msg.type));
  put_u32(out, msg.seq);
  out.insert(out.end(), body.begin(), body.end());
  return out;
}

DecodeResult decode_frame(std::span<const std::uint8_t> bytes) {
  DecodeResult r;
  if (bytes.size() < kHeaderSize) return r;
  const std::uint32_t length = get_u32(bytes, 0);
  const std::uint8_t code = bytes[4];
  r.seq = get_u32(bytes, 5);
  auto error = [&](std::string what, std::size_t consumed) {
    r.status = DecodeStatus::FrameError;
    r.consumed = consumed;
    r.error = "seq " + std::to_string(*r.seq) + ": " + std::move(what);
    return r;
  };
  if (length > kMaxPayload) return error("declared length " + std::to_string(length) + " exceeds limit", 0);
  const auto type = type_from_code(code);
  if (bytes.size() < kHeaderSize + length) {
    if (!type) return error("unknown message type " + std::to_string(code), 0);
    return r;
  }
  const std::size_t total = kHeaderSize + length;
  if (!type) return error("unknown message type " + std::to_string(code), total);
  const auto body = bytes.subspan(kHeaderSize, length);
  Json payload = Json::parse(body.begin(), body.end(), nullptr, false);
  if (payload.is_discarded()) return error("payload is not valid JSON", total);
  try {
    validate_payload(*type, payload);
  } catch (const Error& e) {
    return error(e.what(), total);
  }
  r.status = DecodeStatus::Ok;
  r.consumed = total;
  r.message = Message{*type, *r.seq, std::move(payload)};
  return r;
}

void append_dump_record(std::vector<std::uint8_t>& out, std::uint64_t timestamp_ms, const Message& msg) {
  for (int s = 56; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>(timestamp_ms >> s));
  const auto frame = encode_frame(msg);
  out.insert(out.end(), frame.begin(), frame.end());
}

std::vector<DumpRecord> parse_dump(std::span<const std::uint8_t> bytes) {
  std::vector<DumpRecord> out;
  std::size_t at = 0;
  while (at < bytes.size()) {
    if (bytes.size() - at < 8) fail(ErrorCode::FrameError, "truncated timestamp at byte " + std::to_string(at));
    std::uint64_t ts = 0;
    for (int i = 0; i < 8; ++i) ts = (ts << 8) | bytes[at + i];
    const auto r = decode_frame(bytes.subspan(at + 8));
    if (r.status == DecodeStatus::NeedMoreBytes)
      fail(ErrorCode::FrameError, "truncated frame at byte " + std::to_string(at + 8));
    if (r.status == DecodeStatus::FrameError)
      fail(ErrorCode::FrameError, r.error + " at byte " + std::to_string(at + 8));
    out.push_back({ts, *r.message});
    at += 8 + r.consumed;
  }
  return out;
}

std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_bytes(const std::string& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorCode::IoError, "short write to " + path);
}

}  // namespace pickcell::bus

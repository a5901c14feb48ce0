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

#include "bus_gen.hpp"

#include "common/canonical_json.hpp"

namespace pickcell::testing {

namespace {

double num(Rng& rng, double lo, double hi) { return canonical_float(lo + (hi - lo) * uniform01(rng)); }
std::uint64_t uint(Rng& rng, std::uint64_t n) { return rng() % n; }
bool coin(Rng& rng) { return rng() & 1; }

std::string label(Rng& rng) {
  static const char* names[] = {"hammer", "dog", "duck", "banana", "cup", "x", "tape measure", "\xc3\xa9t\xc3\xa9"};
  return names[uint(rng, 8)];
}

Json counts(Rng& rng, bool positive) {
  Json j = Json::object();
  const int n = 1 + static_cast<int>(uint(rng, 3));
  for (int i = 0; i < n; ++i) j[label(rng)] = positive ? 1 + uint(rng, 9) : uint(rng, 9);
  return j;
}

Json detection(Rng& rng) {
  const double x0 = num(rng, 0, 300), y0 = num(rng, 0, 220);
  Json ids = Json::array();
  for (std::uint64_t i = 0, n = 1 + uint(rng, 2); i < n; ++i) ids.push_back(uint(rng, 20));
  return {{"box", {x0, y0, canonical_float(x0 + 1 + num(rng, 0, 19)), canonical_float(y0 + 1 + num(rng, 0, 19))}},
          {"label", label(rng)},
          {"confidence", num(rng, 0, 1)},
          {"merged", coin(rng)},
          {"source_ids", ids}};
}

}  // namespace

bus::Message random_message(Rng& rng) {
  const auto& reg = bus::registry();
  bus::Message m;
  m.type = reg[uint(rng, reg.size())].type;
  m.seq = static_cast<std::uint32_t>(rng());
  Json p = Json::object();
  using T = bus::MessageType;
  switch (m.type) {
    case T::PickRequest:
      p["request"] = counts(rng, true);
      break;
    case T::TriggerFrame:
      p["mode"] = std::vector<std::string>{"capture", "detect", "grasp"}[uint(rng, 3)];
      p["frame_id"] = uint(rng, 1u << 20);
      if (coin(rng)) p["request"] = counts(rng, false);
      if (coin(rng)) p["detection_index"] = uint(rng, 6);
      break;
    case T::FrameReady:
      p["frame_id"] = uint(rng, 1u << 20);
      p["hole_fraction"] = num(rng, 0, 1);
      break;
    case T::DetectionResult: {
      p["frame_id"] = uint(rng, 1u << 20);
      Json d = Json::array();
      for (std::uint64_t i = 0, n = uint(rng, 5); i < n; ++i) d.push_back(detection(rng));
      p["detections"] = d;
      break;
    }
    case T::GraspResult:
      p["frame_id"] = uint(rng, 1u << 20);
      p["detection_index"] = uint(rng, 6);
      p["found"] = coin(rng);
      if (p["found"]) {
        p["u"] = num(rng, 0, 320);
        p["v"] = num(rng, 0, 240);
        p["theta"] = num(rng, 0, 3.14159);
        p["z"] = num(rng, 0.5, 0.7);
        p["quality"] = num(rng, 0, 1);
        p["opening_px"] = num(rng, 5, 80);
        p["on_filled_hole"] = coin(rng);
      }
      break;
    case T::RobotMove:
      p = {{"cmd_id", uint(rng, 1000)}, {"kind", coin(rng) ? "grasp" : "place"}, {"x", num(rng, -1, 1)},
           {"y", num(rng, -1, 1)},      {"z", num(rng, 0, 0.5)},                  {"yaw", num(rng, -3.2, 3.2)}};
      break;
    case T::RobotStatus:
      p = {{"cmd_id", uint(rng, 1000)}, {"state", coin(rng) ? "done" : "stopped"}, {"x", num(rng, -1, 1)},
           {"y", num(rng, -1, 1)},      {"z", num(rng, 0, 0.5)}};
      break;
    case T::GripperCmd:
      p = {{"cmd_id", uint(rng, 1000)}, {"action", coin(rng) ? "close" : "open"}};
      break;
    case T::GripperStatus:
      p = {{"cmd_id", uint(rng, 1000)},
           {"action", std::vector<std::string>{"close", "open", "stopped"}[uint(rng, 3)]},
           {"width", num(rng, 0, 0.085)}};
      break;
    case T::EStop:
      break;
    case T::Heartbeat:
      p = {{"component", label(rng)}, {"period_ms", 1 + uint(rng, 1000)}};
      break;
    case T::HmiEvent:
      p = {{"kind", "notice"}, {"data", {{"text", label(rng)}, {"n", uint(rng, 100)}, {"v", num(rng, -5, 5)}}}};
      break;
  }
  m.payload = std::move(p);
  return m;
}

}  // namespace pickcell::testing

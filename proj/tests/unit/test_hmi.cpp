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

#include <atomic>
#include <mutex>
#include <set>
#include <thread>

#include "doctest.h"
#include "harness/episode.hpp"
#include "hmi/broadcaster.hpp"
#include "hmi/hmi_service.hpp"
#include "hmi/http_server.hpp"
#include "hmi/live_cell.hpp"
#include "httplib.h"

using namespace pickcell;
using namespace pickcell::hmi;
using namespace std::chrono_literals;

namespace {

bus::Message hmi_event(const std::string& kind, Json data) {
  return {bus::MessageType::HmiEvent, 0, {{"kind", kind}, {"data", std::move(data)}}};
}

bus::Message transition(const std::string& from, const std::string& event, const std::string& to) {
  return hmi_event("transition", {{"timestamp_ms", 0}, {"state_from", from}, {"event", event}, {"state_to", to},
                                  {"actions", Json::array()}});
}

std::vector<Json> parse_lines(const std::vector<std::string>& lines) {
  std::vector<Json> out;
  for (const auto& l : lines) out.push_back(Json::parse(l));
  return out;
}

struct CountingHooks {
  int requests = 0, estops = 0, resets = 0;
  ClassCounts last;
  HmiService::Hooks hooks() {
    return {[this](const ClassCounts& c) {
              ++requests;
              last = c;
            },
            [this] { ++estops; }, [this] { ++resets; }};
  }
};

/// First class label present in the bin the live cell will build.
std::string present_label(const harness::RunConfig& cfg, std::uint64_t seed) {
  harness::Episode probe(cfg, seed);
  return probe.scene().objects.front().class_label;
}

/// Reads /api/events on its own thread and keeps every parsed line.
class StreamReader {
 public:
  explicit StreamReader(int port) : cli_("127.0.0.1", port) {
    cli_.set_read_timeout(5, 0);
    thread_ = std::thread([this] {
      cli_.Get("/api/events", [this](const char* data, std::size_t n) {
        std::lock_guard lock(mu_);
        buf_.append(data, n);
        for (std::size_t nl; (nl = buf_.find('\n')) != std::string::npos;) {
          lines_.push_back(Json::parse(buf_.substr(0, nl)));
          buf_.erase(0, nl + 1);
        }
        return !stop_;
      });
    });
  }
  ~StreamReader() { close(); }

  void close() {
    stop_ = true;
    if (thread_.joinable()) thread_.join();
  }
  std::vector<Json> lines() {
    std::lock_guard lock(mu_);
    return lines_;
  }
  bool wait_for(const std::function<bool(const std::vector<Json>&)>& pred, std::chrono::milliseconds limit) {
    const auto end = std::chrono::steady_clock::now() + limit;
    while (std::chrono::steady_clock::now() < end) {
      if (pred(lines())) return true;
      std::this_thread::sleep_for(10ms);
    }
    return pred(lines());
  }

 private:
  httplib::Client cli_;
  std::thread thread_;
  std::mutex mu_;
  std::string buf_;
  std::vector<Json> lines_;
  std::atomic<bool> stop_{false};
};

struct Served {
  LiveCell cell;
  HttpServer server;
  int port;
  std::thread thread;

  Served(const harness::RunConfig& cfg, std::uint64_t seed, std::chrono::milliseconds keepalive)
      : cell(cfg, seed), server(cell.hmi(), HttpOptions{keepalive}), port(server.bind("127.0.0.1", 0)) {
    thread = std::thread([this] { server.serve(); });
    httplib::Client c("127.0.0.1", port);
    for (int i = 0; i < 200 && !c.Get("/api/catalog"); ++i) std::this_thread::sleep_for(10ms);
  }
  ~Served() {
    server.stop();
    thread.join();
  }
};

bool reached(const std::vector<Json>& lines, const std::string& state) {
  for (const auto& l : lines)
    if (l.at("type") == "transition" && l.at("record").at("state_to") == state) return true;
  return false;
}

}  // namespace

TEST_CASE("broadcaster keeps order and stamps sequence numbers") {
  EventBroadcaster b(16);
  auto s1 = b.subscribe({{"type", "snapshot"}});
  auto s2 = b.subscribe({{"type", "snapshot"}});
  for (int i = 0; i < 10; ++i) b.publish({{"type", "x"}, {"i", i}});
  const auto a = s1->drain(), c = s2->drain();
  CHECK(a == c);
  REQUIRE(a.size() == 11);
  const auto j = parse_lines(a);
  CHECK(j[0].at("seq") == 0);
  for (int i = 0; i < 10; ++i) {
    CHECK(j[i + 1].at("i") == i);
    CHECK(j[i + 1].at("seq") == i + 1);
  }
  CHECK(b.last_seq() == 10);
  CHECK(b.subscriber_count() == 2);
  b.unsubscribe(s1);
  CHECK(b.subscriber_count() == 1);
  CHECK(s1->closed());
  CHECK_FALSE(s1->next(1ms).has_value());
}

TEST_CASE("slow subscriber sees a gap marker") {
  EventBroadcaster b(4);
  auto s = b.subscribe({{"type", "snapshot"}});
  for (int i = 0; i < 10; ++i) b.publish({{"type", "x"}, {"i", i}});
  const auto j = parse_lines(s->drain());
  REQUIRE(j.size() == 5);
  CHECK(j[0].at("type") == "gap");
  CHECK(j[0].at("dropped") == 7);
  for (int k = 0; k < 4; ++k) CHECK(j[k + 1].at("i") == 6 + k);
  // snapshot plus events 1..6 went missing
  CHECK(j[1].at("seq") == 7);
}

TEST_CASE("late subscriber gets the snapshot first") {
  CountingHooks h;
  HmiService svc({"dog", "hammer"}, h.hooks());
  svc.on_bus(transition("Idle", "RequestReceived", "CaptureFrame"));
  svc.on_bus(transition("CaptureFrame", "FrameReady", "Detecting"));
  auto sub = svc.subscribe();
  svc.on_bus(transition("Detecting", "DetectionsReady", "SelectingObject"));
  const auto j = parse_lines(sub->drain());
  REQUIRE(j.size() == 2);
  CHECK(j[0].at("type") == "snapshot");
  CHECK(j[0].at("snapshot").at("cell_state") == "Detecting");
  CHECK(j[0].at("seq") == 2);
  CHECK(j[1].at("seq") == 3);
  CHECK(j[1].at("record").at("state_to") == "SelectingObject");
}

TEST_CASE("request validation") {
  CountingHooks h;
  HmiService svc({"dog", "hammer"}, h.hooks());
  CHECK(svc.handle_request("not json").status == 400);
  CHECK(svc.handle_request("{}").status == 400);
  CHECK(svc.handle_request("[]").status == 400);
  CHECK(svc.handle_request(R"({"unicorn":1})").status == 400);
  CHECK(svc.handle_request(R"({"dog":0})").status == 400);
  CHECK(svc.handle_request(R"({"dog":-2})").status == 400);
  CHECK(svc.handle_request(R"({"dog":1.5})").status == 400);
  CHECK(svc.handle_request(R"({"dog":"2"})").status == 400);
  CHECK(svc.handle_request(R"({"dog":1001})").status == 400);
  CHECK(h.requests == 0);

  const auto ok = svc.handle_request(R"({"request":{"dog":2,"hammer":1}})");
  CHECK(ok.status == 202);
  CHECK(h.requests == 1);
  CHECK(h.last == ClassCounts{{"dog", 2}, {"hammer", 1}});
  // in flight until the controller answers
  CHECK(svc.handle_request(R"({"dog":1})").status == 409);
  svc.on_bus(hmi_event("request", {{"dog", 2}, {"hammer", 1}}));
  svc.on_bus(transition("Idle", "RequestReceived", "CaptureFrame"));
  CHECK(svc.handle_request(R"({"dog":1})").status == 409);
  svc.on_bus(transition("UpdatingList", "ListFulfilled", "Done"));
  CHECK(svc.handle_request(R"({"dog":1})").status == 202);
  CHECK(h.requests == 2);
}

TEST_CASE("estop is idempotent and always accepted") {
  CountingHooks h;
  HmiService svc({"dog"}, h.hooks());
  CHECK(svc.handle_estop().status == 200);
  svc.on_bus(transition("Idle", "EStop", "Halted"));
  CHECK(svc.cell_state() == "Halted");
  CHECK(svc.handle_estop().status == 200);
  CHECK(svc.cell_state() == "Halted");
  CHECK(h.estops == 2);
  CHECK(svc.handle_request(R"({"dog":1})").status == 409);
  CHECK(svc.handle_reset().status == 200);
  CHECK(h.resets == 1);
}

TEST_CASE("snapshot follows the bus") {
  CountingHooks h;
  HmiService svc({"dog", "hammer"}, h.hooks());
  svc.on_bus(hmi_event("request", {{"dog", 2}}));
  svc.on_bus(hmi_event("detections", {{"frame_id", 1},
                                      {"detections", Json::array({{{"box", {1, 2, 3, 4}}, {"label", "dog"}, {"confidence", 0.9}}})},
                                      {"selected", 0}}));
  svc.on_bus(hmi_event("grasp", {{"u", 10}, {"v", 20}, {"theta", 0.5}}));
  svc.on_bus(hmi_event("picked", {{"class", "dog"}, {"remaining", {{"dog", 1}}}}));
  svc.on_bus(hmi_event("unavailable", {{"classes", {"dog"}}}));
  svc.on_bus({bus::MessageType::EStop, 0, Json::object()});
  const Json s = svc.snapshot();
  CHECK(s.at("active_request").at("request") == Json{{"dog", 2}});
  CHECK(s.at("active_request").at("remaining") == Json{{"dog", 1}});
  CHECK(s.at("last_detections").size() == 1);
  CHECK(s.at("selected") == 0);
  CHECK(s.at("last_grasp").at("overlay") == "/api/overlay/latest.png");
  CHECK(s.at("unavailable") == Json{"dog"});
  CHECK(s.at("seq") == 5);
  CHECK_FALSE(svc.overlay().has_value());
}

TEST_CASE("http: a request runs to Done and the stream follows the log") {
  harness::RunConfig cfg;
  const std::uint64_t seed = 6;
  const std::string label = present_label(cfg, seed);
  Served s(cfg, seed, 200ms);
  httplib::Client cli("127.0.0.1", s.port);

  auto cat = cli.Get("/api/catalog");
  REQUIRE(cat);
  CHECK(cat->status == 200);
  CHECK(Json::parse(cat->body).at("classes").size() == sim::default_catalog().size());
  auto png = cli.Get("/api/overlay/latest.png");
  REQUIRE(png);
  CHECK(png->status == 404);

  StreamReader a(s.port), b(s.port);
  REQUIRE(a.wait_for([](const auto& l) { return !l.empty(); }, 5s));
  REQUIRE(b.wait_for([](const auto& l) { return !l.empty(); }, 5s));

  CHECK(cli.Post("/api/request", R"({"nope":1})", "application/json")->status == 400);
  auto res = cli.Post("/api/request", Json{{label, 1}}.dump(), "application/json");
  REQUIRE(res);
  CHECK(res->status == 202);
  CHECK(cli.Post("/api/request", Json{{label, 1}}.dump(), "application/json")->status == 409);

  for (int i = 0; i < 600 && s.cell.state() != controller::CellState::Done; ++i) s.cell.advance(100'000);
  REQUIRE(s.cell.state() == controller::CellState::Done);
  REQUIRE(a.wait_for([](const auto& l) { return reached(l, "Done"); }, 5s));
  REQUIRE(b.wait_for([](const auto& l) { return reached(l, "Done"); }, 5s));

  auto state = cli.Get("/api/state");
  REQUIRE(state);
  const Json snap = Json::parse(state->body);
  CHECK(snap.at("cell_state") == "Done");
  CHECK(snap.at("active_request").at("remaining").at(label) == 0);
  CHECK(Json::parse(cli.Get("/api/metrics")->body).at("picks_succeeded") == 1);
  png = cli.Get("/api/overlay/latest.png");
  REQUIRE(png);
  CHECK(png->status == 200);
  CHECK(png->get_header_value("Content-Type") == "image/png");
  CHECK(png->body.substr(1, 3) == "PNG");

  a.close();
  b.close();
  auto filter = [](const std::vector<Json>& lines) {
    std::vector<Json> out;
    for (const auto& l : lines)
      if (l.at("type") != "heartbeat" && l.at("type") != "snapshot") out.push_back(l);
    return out;
  };
  const auto ea = filter(a.lines()), eb = filter(b.lines());
  CHECK(ea == eb);
  // contiguous sequence numbers, and the transitions chain state to state
  std::string prev = "Idle";
  std::set<std::string> kinds;
  for (std::size_t i = 0; i < ea.size(); ++i) {
    if (i) CHECK(ea[i].at("seq") == ea[i - 1].at("seq").get<int>() + 1);
    kinds.insert(ea[i].at("type").get<std::string>());
    if (ea[i].at("type") != "transition") continue;
    const Json& r = ea[i].at("record");
    if (r.at("state_from") == r.at("state_to") && r.at("actions") == Json{"LogIgnored"}) continue;
    CHECK(r.at("state_from") == prev);
    prev = r.at("state_to").get<std::string>();
  }
  CHECK(prev == "Done");
  CHECK(kinds.count("request"));
  CHECK(kinds.count("detections"));
  CHECK(kinds.count("grasp"));
  CHECK(kinds.count("picked"));
}

TEST_CASE("http: estop halts the cell and reset recovers it") {
  harness::RunConfig cfg;
  const std::uint64_t seed = 6;
  const std::string label = present_label(cfg, seed);
  Served s(cfg, seed, 200ms);
  httplib::Client cli("127.0.0.1", s.port);
  REQUIRE(cli.Post("/api/request", Json{{"request", {{label, 1}}}}.dump(), "application/json")->status == 202);
  while (s.cell.state() != controller::CellState::MovingToGrasp) s.cell.advance(10'000);
  auto r = cli.Post("/api/estop", "", "application/json");
  REQUIRE(r);
  CHECK(r->status == 200);
  s.cell.advance(10'000);
  CHECK(s.cell.state() == controller::CellState::Halted);
  CHECK(cli.Post("/api/estop", "", "application/json")->status == 200);
  s.cell.advance(10'000);
  CHECK(s.cell.state() == controller::CellState::Halted);
  CHECK(Json::parse(cli.Get("/api/state")->body).at("cell_state") == "Halted");
  CHECK(cli.Post("/api/request", Json{{label, 1}}.dump(), "application/json")->status == 409);
  CHECK(cli.Post("/api/reset", "", "application/json")->status == 200);
  s.cell.advance(20'000);
  CHECK(s.cell.state() == controller::CellState::Idle);
  CHECK(cli.Post("/api/request", Json{{label, 1}}.dump(), "application/json")->status == 202);
}

TEST_CASE("http: idle stream sends keepalive snapshots") {
  harness::RunConfig cfg;
  Served s(cfg, 1, 100ms);
  StreamReader r(s.port);
  REQUIRE(r.wait_for(
      [](const auto& l) {
        int beats = 0;
        for (const auto& x : l) beats += x.at("type") == "heartbeat";
        return beats >= 3;
      },
      5s));
  const auto lines = r.lines();
  CHECK(lines.front().at("type") == "snapshot");
  for (const auto& x : lines)
    if (x.at("type") == "heartbeat") CHECK(x.at("snapshot").at("cell_state") == "Idle");
}

TEST_CASE("paced live cell advances on its own") {
  harness::RunConfig cfg;
  LiveCell cell(cfg, 1, 50.0);
  cell.start();
  std::this_thread::sleep_for(200ms);
  cell.stop();
  CHECK(cell.now() > 1'000'000);
  CHECK_THROWS(LiveCell(cfg, 1, 0.0));
}

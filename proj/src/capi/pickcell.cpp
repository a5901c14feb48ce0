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

#include "pickcell/pickcell.h"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <map>
#include <thread>

#include "bus/codec.hpp"
#include "common/canonical_json.hpp"
#include "common/error.hpp"
#include "harness/config.hpp"
#include "harness/run.hpp"
#include "hmi/http_server.hpp"
#include "hmi/live_cell.hpp"

using namespace pickcell;

struct pc_config {
  harness::RunConfig cfg;
};

struct pc_run {
  harness::RunConfig cfg;
  harness::RunResult result;
  bool captured = false;
};

struct pc_server {
  std::unique_ptr<hmi::LiveCell> cell;
  std::unique_ptr<hmi::HttpServer> http;
  std::thread listener;
  int port = 0;
  bool started = false;
};

namespace {

thread_local std::string g_last_error;

pc_status status_of(ErrorCode c) { return static_cast<pc_status>(static_cast<int>(c) + 1); }

template <typename F>
pc_status guarded(F&& f) {
  g_last_error.clear();
  try {
    f();
    return PC_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return PC_ERR_INTERNAL;
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) fail(ErrorCode::Internal, "out of memory");
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void need(const void* p, const char* what) {
  if (!p) fail(ErrorCode::InvalidArgument, std::string(what) + " is null");
}

std::string log_name(const pc_run& run, std::size_t i) {
  return "transitions-" + harness::config_hash(run.cfg) + "-" + std::to_string(run.result.episodes[i].seed) + ".ndjson";
}

std::vector<std::string> log_names(const pc_run& run) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < run.result.episodes.size(); ++i) names.push_back(log_name(run, i));
  return names;
}

}  // namespace

extern "C" {

const char* pc_version(void) { return "0.1.0"; }

const char* pc_status_name(pc_status status) {
  if (status == PC_OK) return "Ok";
  const int i = static_cast<int>(status) - 1;
  if (i < 0 || i > static_cast<int>(ErrorCode::Internal)) return "Unknown";
  return to_string(static_cast<ErrorCode>(i));
}

const char* pc_last_error(void) { return g_last_error.c_str(); }

void pc_string_free(char* s) { std::free(s); }

pc_status pc_config_default(pc_config** out) {
  return guarded([&] {
    need(out, "out");
    *out = new pc_config{};
  });
}

pc_status pc_config_load(const char* path, pc_config** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new pc_config{harness::load_config(path)};
  });
}

pc_status pc_config_parse(const char* text, pc_config** out) {
  return guarded([&] {
    need(text, "text");
    need(out, "out");
    *out = new pc_config{harness::parse_config(text)};
  });
}

pc_status pc_config_patch(pc_config* cfg, const char* json_patch) {
  return guarded([&] {
    need(cfg, "cfg");
    need(json_patch, "json_patch");
    Json patch;
    try {
      patch = Json::parse(json_patch);
    } catch (const Json::exception& e) {
      fail(ErrorCode::ParseError, e.what());
    }
    Json j = cfg->cfg.to_json();
    j.merge_patch(patch);
    cfg->cfg = harness::RunConfig::from_json(j);
  });
}

pc_status pc_config_dump(const pc_config* cfg, char** out_json) {
  return guarded([&] {
    need(cfg, "cfg");
    need(out_json, "out_json");
    *out_json = dup_string(harness::dump_config(cfg->cfg));
  });
}

pc_status pc_config_hash(const pc_config* cfg, char** out_hex) {
  return guarded([&] {
    need(cfg, "cfg");
    need(out_hex, "out_hex");
    *out_hex = dup_string(harness::config_hash(cfg->cfg));
  });
}

int pc_config_episodes(const pc_config* cfg) { return cfg ? cfg->cfg.episodes : 0; }

void pc_config_free(pc_config* cfg) { delete cfg; }

pc_status pc_run_create(const pc_config* cfg, uint64_t seed, int episodes, int capture_bus, pc_run** out) {
  return guarded([&] {
    need(cfg, "cfg");
    need(out, "out");
    auto run = std::make_unique<pc_run>();
    run->cfg = cfg->cfg;
    run->captured = capture_bus != 0;
    run->result = harness::run_episodes(cfg->cfg, seed, episodes > 0 ? episodes : cfg->cfg.episodes, capture_bus != 0);
    *out = run.release();
  });
}

pc_status pc_run_summary(const pc_run* run, pc_summary* out) {
  return guarded([&] {
    need(run, "run");
    need(out, "out");
    const auto& m = run->result.aggregate;
    *out = pc_summary{static_cast<int>(run->result.episodes.size()),
                      m.picks_attempted,
                      m.picks_succeeded,
                      m.success_rate,
                      m.cycles,
                      m.picks_per_hour,
                      m.latency.mean_ms,
                      m.latency.max_ms,
                      run->result.faulted() ? 1 : 0};
  });
}

pc_status pc_run_report_json(const pc_run* run, int with_logs, char** out_json) {
  return guarded([&] {
    need(run, "run");
    need(out_json, "out_json");
    const auto names = with_logs ? log_names(*run) : std::vector<std::string>{};
    *out_json = dup_string(canonical_dump(harness::build_report(run->cfg, run->result, names)) + "\n");
  });
}

pc_status pc_run_write(const pc_run* run, const char* report_path, const char* busdump_path) {
  return guarded([&] {
    need(run, "run");
    if (busdump_path && !run->captured) fail(ErrorCode::InvalidArgument, "run was created without bus capture");
    if (report_path) {
      const std::filesystem::path report(report_path);
      const auto dir = report.parent_path();
      const auto names = log_names(*run);
      for (std::size_t i = 0; i < names.size(); ++i) {
        const std::string text = harness::format_transition_log(run->result.episodes[i].transitions);
        bus::write_file_bytes((dir / names[i]).string(),
                              {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
      }
      const std::string text = canonical_dump(harness::build_report(run->cfg, run->result, names)) + "\n";
      bus::write_file_bytes(report.string(), {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
    }
    if (busdump_path) bus::write_file_bytes(busdump_path, run->result.busdump);
  });
}

int pc_run_faulted(const pc_run* run) { return run && run->result.faulted() ? 1 : 0; }

void pc_run_free(pc_run* run) { delete run; }

pc_status pc_replay_file(const char* busdump_path, char** out_ndjson) {
  return guarded([&] {
    need(busdump_path, "busdump_path");
    need(out_ndjson, "out_ndjson");
    const auto bytes = bus::read_file_bytes(busdump_path);
    const auto records = bus::parse_dump(bytes);
    std::string out;
    std::map<std::string, int> by_type;
    int transitions = 0;
    std::string final_state = "Idle";
    std::uint64_t last_ms = 0;
    for (const auto& r : records) {
      const std::string type = bus::to_string(r.message.type);
      ++by_type[type];
      last_ms = r.timestamp_ms;
      if (r.message.type == bus::MessageType::HmiEvent && r.message.payload.at("kind") == "transition") {
        ++transitions;
        final_state = r.message.payload.at("data").at("state_to").get<std::string>();
      }
      out += canonical_dump(
          {{"t_ms", r.timestamp_ms}, {"seq", r.message.seq}, {"type", type}, {"payload", r.message.payload}});
      out += '\n';
    }
    out += canonical_dump({{"type", "summary"},
                           {"records", records.size()},
                           {"by_type", by_type},
                           {"transitions", transitions},
                           {"final_state", final_state},
                           {"last_t_ms", last_ms}});
    out += '\n';
    *out_ndjson = dup_string(out);
  });
}

pc_status pc_server_create(const pc_config* cfg, uint64_t seed, double speed, const char* host, int port,
                           pc_server** out) {
  return guarded([&] {
    need(cfg, "cfg");
    need(out, "out");
    if (port < 0 || port > 65535) fail(ErrorCode::InvalidArgument, "port out of range");
    auto s = std::make_unique<pc_server>();
    s->cell = std::make_unique<hmi::LiveCell>(cfg->cfg, seed, speed);
    s->http = std::make_unique<hmi::HttpServer>(s->cell->hmi());
    s->port = s->http->bind(host ? host : "127.0.0.1", port);
    *out = s.release();
  });
}

int pc_server_port(const pc_server* server) { return server ? server->port : -1; }

pc_status pc_server_start(pc_server* server) {
  return guarded([&] {
    need(server, "server");
    if (server->started) return;
    server->started = true;
    server->cell->start();
    server->listener = std::thread([server] { server->http->serve(); });
  });
}

void pc_server_stop(pc_server* server) {
  if (!server || !server->started) return;
  server->http->stop();
  if (server->listener.joinable()) server->listener.join();
  server->cell->stop();
  server->started = false;
}

void pc_server_free(pc_server* server) {
  pc_server_stop(server);
  delete server;
}

}  // extern "C"

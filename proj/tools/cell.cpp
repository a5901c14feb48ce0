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
#include <chrono>
#include <csignal>
#include <cstdio>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "pickcell/pickcell.h"

namespace {

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop = true; }

int report_error(pc_status st, const char* what) {
  std::fprintf(stderr, "cell: %s: %s: %s\n", what, pc_status_name(st), pc_last_error());
  return 1;
}

pc_config* load(const std::string& path, pc_status& st) {
  pc_config* cfg = nullptr;
  st = path.empty() ? pc_config_default(&cfg) : pc_config_load(path.c_str(), &cfg);
  return cfg;
}

int cmd_run(const std::string& config, std::uint64_t seed, int episodes, const std::string& report,
            const std::string& busdump) {
  pc_status st;
  pc_config* cfg = load(config, st);
  if (st != PC_OK) return report_error(st, "config");
  pc_run* run = nullptr;
  st = pc_run_create(cfg, seed, episodes, busdump.empty() ? 0 : 1, &run);
  pc_config_free(cfg);
  if (st != PC_OK) return report_error(st, "run");

  if (!report.empty() || !busdump.empty()) {
    st = pc_run_write(run, report.empty() ? nullptr : report.c_str(), busdump.empty() ? nullptr : busdump.c_str());
    if (st != PC_OK) {
      pc_run_free(run);
      return report_error(st, "write");
    }
  }
  if (report.empty()) {
    char* json = nullptr;
    st = pc_run_report_json(run, 0, &json);
    if (st != PC_OK) {
      pc_run_free(run);
      return report_error(st, "report");
    }
    std::fputs(json, stdout);
    pc_string_free(json);
  } else {
    pc_summary s{};
    pc_run_summary(run, &s);
    std::printf("episodes %d  picks %d/%d  success %.3f  picks/h %.1f  latency mean %.0f ms max %.0f ms\n", s.episodes,
                s.picks_succeeded, s.picks_attempted, s.success_rate, s.picks_per_hour, s.latency_mean_ms,
                s.latency_max_ms);
  }
  const int faulted = pc_run_faulted(run);
  pc_run_free(run);
  if (faulted) std::fprintf(stderr, "cell: component fault recorded, see report\n");
  return faulted ? 2 : 0;
}

int cmd_serve(const std::string& config, std::uint64_t seed, const std::string& host, int port, double speed) {
  pc_status st;
  pc_config* cfg = load(config, st);
  if (st != PC_OK) return report_error(st, "config");
  pc_server* server = nullptr;
  st = pc_server_create(cfg, seed, speed, host.c_str(), port, &server);
  pc_config_free(cfg);
  if (st != PC_OK) return report_error(st, "serve");
  st = pc_server_start(server);
  if (st != PC_OK) {
    pc_server_free(server);
    return report_error(st, "serve");
  }
  std::printf("listening on http://%s:%d\n", host.c_str(), pc_server_port(server));
  std::fflush(stdout);
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  pc_server_free(server);
  return 0;
}

int cmd_replay(const std::string& path) {
  char* text = nullptr;
  const pc_status st = pc_replay_file(path.c_str(), &text);
  if (st != PC_OK) return report_error(st, "replay");
  std::fputs(text, stdout);
  pc_string_free(text);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pickcell: simulated pick-and-place cell"};
  app.require_subcommand(1);
  app.set_version_flag("--version", pc_version());

  std::string config;
  std::uint64_t seed = 1;

  auto* run = app.add_subcommand("run", "run headless episodes and report metrics");
  int episodes = 0;
  std::string report, busdump;
  bool headless = false;
  run->add_option("--config", config, "config file (JSON, comments allowed)")->check(CLI::ExistingFile);
  run->add_option("--seed", seed, "run seed")->required();
  run->add_option("--episodes", episodes, "episodes (default: config value)")->check(CLI::PositiveNumber);
  run->add_option("--report", report, "write the report here; transition logs go next to it");
  run->add_option("--busdump", busdump, "capture every bus frame to this file");
  run->add_flag("--headless", headless, "no HMI (runs are always headless)");

  auto* serve = app.add_subcommand("serve", "live cell behind the HMI HTTP API");
  std::string host = "127.0.0.1";
  int port = 8080;
  double speed = 1.0;
  serve->add_option("--config", config, "config file")->check(CLI::ExistingFile);
  serve->add_option("--port", port, "listen port (0 = any)")->check(CLI::Range(0, 65535));
  serve->add_option("--host", host, "listen address");
  serve->add_option("--seed", seed, "bin seed");
  serve->add_option("--speed", speed, "simulated seconds per wall second")->check(CLI::PositiveNumber);

  auto* replay = app.add_subcommand("replay", "decode a .busdump capture");
  std::string dump;
  replay->add_option("busdump", dump, "capture file")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  if (*run) return cmd_run(config, seed, episodes, report, busdump);
  if (*serve) return cmd_serve(config, seed, host, port, speed);
  return cmd_replay(dump);
}

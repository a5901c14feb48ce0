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

#ifndef PICKCELL_PICKCELL_H
#define PICKCELL_PICKCELL_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define PC_API __declspec(dllexport)
#else
#define PC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pc_status {
  PC_OK = 0,
  PC_ERR_INVALID_ARGUMENT = 1,
  PC_ERR_PLACEMENT_FAILURE = 2,
  PC_ERR_OUT_OF_BOUNDS = 3,
  PC_ERR_BAD_ROI = 4,
  PC_ERR_BAD_BOX = 5,
  PC_ERR_ALL_HOLES = 6,
  PC_ERR_NO_FEASIBLE_GRASP = 7,
  PC_ERR_BAD_DEPTH = 8,
  PC_ERR_SCHEMA_VIOLATION = 9,
  PC_ERR_FRAME_ERROR = 10,
  PC_ERR_PARSE_ERROR = 11,
  PC_ERR_UNKNOWN_KEY = 12,
  PC_ERR_VALIDATION_ERROR = 13,
  PC_ERR_MALFORMED_LOG = 14,
  PC_ERR_IO = 15,
  PC_ERR_INTERNAL = 16
} pc_status;

typedef struct pc_config pc_config;
typedef struct pc_run pc_run;
typedef struct pc_server pc_server;

typedef struct pc_summary {
  int episodes;
  int picks_attempted;
  int picks_succeeded;
  double success_rate;
  int cycles;
  double picks_per_hour;
  double latency_mean_ms;
  double latency_max_ms;
  int faulted;  /* nonzero when any component fault was recorded */
} pc_summary;

PC_API const char* pc_version(void);
PC_API const char* pc_status_name(pc_status status);
/* Message of the last failed call on this thread; empty when none. */
PC_API const char* pc_last_error(void);
/* Frees strings returned through char** out-parameters. */
PC_API void pc_string_free(char* s);

/* Configuration. */
PC_API pc_status pc_config_default(pc_config** out);
PC_API pc_status pc_config_load(const char* path, pc_config** out);
PC_API pc_status pc_config_parse(const char* text, pc_config** out);
/* Applies a JSON merge patch to the resolved config and re-validates. */
PC_API pc_status pc_config_patch(pc_config* cfg, const char* json_patch);
PC_API pc_status pc_config_dump(const pc_config* cfg, char** out_json);
PC_API pc_status pc_config_hash(const pc_config* cfg, char** out_hex);
PC_API int pc_config_episodes(const pc_config* cfg);
PC_API void pc_config_free(pc_config* cfg);

/* Headless runs. episodes <= 0 uses the config value. Runs to completion. */
PC_API pc_status pc_run_create(const pc_config* cfg, uint64_t seed, int episodes, int capture_bus, pc_run** out);
PC_API pc_status pc_run_summary(const pc_run* run, pc_summary* out);
/* Report JSON. With with_logs nonzero, per-episode transition log file names
   are listed (see pc_run_write). */
PC_API pc_status pc_run_report_json(const pc_run* run, int with_logs, char** out_json);
/* Writes the report, the transition logs next to it, and optionally the
   busdump (requires capture_bus). Either path may be NULL. */
PC_API pc_status pc_run_write(const pc_run* run, const char* report_path, const char* busdump_path);
PC_API int pc_run_faulted(const pc_run* run);
PC_API void pc_run_free(pc_run* run);

/* Busdump replay: one JSON line per record, then a summary line. */
PC_API pc_status pc_replay_file(const char* busdump_path, char** out_ndjson);

/* Live cell behind the HTTP API. speed scales simulated time against wall time. */
PC_API pc_status pc_server_create(const pc_config* cfg, uint64_t seed, double speed, const char* host, int port,
                                  pc_server** out);
PC_API int pc_server_port(const pc_server* server);
/* Starts the cell and the HTTP listener on background threads. */
PC_API pc_status pc_server_start(pc_server* server);
PC_API void pc_server_stop(pc_server* server);
PC_API void pc_server_free(pc_server* server);

#ifdef __cplusplus
}
#endif

#endif

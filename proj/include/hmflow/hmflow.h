/* Copyright 2026 The hmflow Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface to hmflow.
 *
 * Every function returns an hmf_status. On failure, hmf_last_error() holds a
 * message for the calling thread until its next call into the library.
 * Strings handed out through `char** out` are NUL-terminated, owned by the
 * caller and released with hmf_string_free. Handles are not thread-safe;
 * distinct handles may be used from distinct threads.
 */

#ifndef HMFLOW_HMFLOW_H_
#define HMFLOW_HMFLOW_H_

#include <stddef.h>

#if defined(_WIN32)
#if defined(HMFLOW_BUILDING)
#define HMF_API __declspec(dllexport)
#else
#define HMF_API __declspec(dllimport)
#endif
#else
#define HMF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hmf_status {
  HMF_OK = 0,
  HMF_E_INVALID_ARGUMENT = 1,
  HMF_E_PRECONDITION = 2,
  HMF_E_NOT_FOUND = 3,
  HMF_E_PARSE = 4,
  HMF_E_VALIDATION = 5,
  HMF_E_IO = 6,
  HMF_E_INTERNAL = 7
} hmf_status;

typedef struct hmf_scenario hmf_scenario;
typedef struct hmf_run hmf_run;

HMF_API const char* hmf_version(void);
HMF_API const char* hmf_last_error(void);
HMF_API void hmf_string_free(char* s);

/* Scenarios. Load and parse fail with HMF_E_PARSE for syntax errors and
 * HMF_E_VALIDATION for schema violations; the message lists every issue as
 * "<location>: <message>" lines. */
HMF_API hmf_status hmf_scenario_load(const char* path, hmf_scenario** out);
HMF_API hmf_status hmf_scenario_parse(const char* text, size_t len,
                                      hmf_scenario** out);
HMF_API hmf_status hmf_scenario_clone(const hmf_scenario* s,
                                      hmf_scenario** out);
HMF_API void hmf_scenario_free(hmf_scenario* s);

/* Sets one scalar field, addressed by a dotted path ("controller.K",
 * "workflow.nodes.0.microtasks"). The value is read as a JSON literal and
 * falls back to a plain string. Applied overrides are recorded in traces. */
HMF_API hmf_status hmf_scenario_override(hmf_scenario* s, const char* key,
                                         const char* value);
HMF_API hmf_status hmf_scenario_name(const hmf_scenario* s, char** out);
HMF_API hmf_status hmf_scenario_to_json(const hmf_scenario* s, char** out);
HMF_API hmf_status hmf_scenario_digest(const hmf_scenario* s, char** out);

/* Runs. SLO misses are data: a completed run returns HMF_OK. */
HMF_API hmf_status hmf_run_execute(const hmf_scenario* s, int record_trace,
                                   hmf_run** out);
HMF_API void hmf_run_free(hmf_run* r);
HMF_API hmf_status hmf_run_trace(const hmf_run* r, char** out);
HMF_API hmf_status hmf_run_summary_json(const hmf_run* r, char** out);

/* Sets *out to 1 when the summary rebuilt from the run's trace equals the
 * live summary, 0 otherwise. */
HMF_API hmf_status hmf_run_replay_matches(const hmf_run* r, int* out);

/* Summary JSON rebuilt from an NDJSON trace. */
HMF_API hmf_status hmf_trace_summary_json(const char* ndjson, size_t len,
                                          char** out);

/* Renders the report tables of an NDJSON trace. `format` is "table" or
 * "csv". *out is a JSON object mapping table name to rendered text, in
 * report order under the key "order". */
HMF_API hmf_status hmf_report_render(const char* ndjson, size_t len,
                                     const char* format, char** out);

/* Closed-form helpers. */
HMF_API hmf_status hmf_partition(int n, double lambda, int* n_human,
                                 int* n_machine);
HMF_API hmf_status hmf_majority_accuracy(double p, int w, int categories,
                                         double* out);
HMF_API hmf_status hmf_invert_majority_accuracy(double target, int w,
                                                int categories, double* out);

#ifdef __cplusplus
}
#endif

#endif /* HMFLOW_HMFLOW_H_ */

// Copyright 2026 The hmflow Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hmflow/hmflow.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <string>
#include <utility>
#include <vector>

#include "hmflow/agents.hpp"
#include "hmflow/controller.hpp"
#include "hmflow/engine.hpp"
#include "hmflow/report.hpp"
#include "hmflow/scenario.hpp"

struct hmf_scenario {
  hmflow::Scenario scenario;
  std::vector<std::pair<std::string, std::string>> overrides;
};

struct hmf_run {
  hmflow::RunResult result;
};

namespace {

thread_local std::string g_last_error;

hmf_status set_error(hmf_status code, std::string msg) {
  g_last_error = std::move(msg);
  return code;
}

hmf_status from_code(hmflow::ErrorCode c) {
  return static_cast<hmf_status>(static_cast<int>(c));
}

// Runs `f`, translating exceptions into status codes.
template <typename F>
hmf_status guarded(F&& f) {
  g_last_error.clear();
  try {
    return f();
  } catch (const hmflow::Error& e) {
    return set_error(from_code(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(HMF_E_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(HMF_E_INTERNAL, e.what());
  } catch (...) {
    return set_error(HMF_E_INTERNAL, "unknown error");
  }
}

hmf_status give(const std::string& s, char** out) {
  char* buf = static_cast<char*>(std::malloc(s.size() + 1));
  if (!buf) return set_error(HMF_E_INTERNAL, "out of memory");
  std::memcpy(buf, s.data(), s.size());
  buf[s.size()] = '\0';
  *out = buf;
  return HMF_OK;
}

hmf_status from_load(hmflow::LoadResult r, hmf_scenario** out) {
  if (!r.ok()) {
    const bool syntax = !r.issues.empty() &&
                        r.issues.front().location.rfind("line ", 0) == 0;
    const bool io = !r.issues.empty() &&
                    r.issues.front().message == "cannot open scenario file";
    return set_error(io ? HMF_E_IO : syntax ? HMF_E_PARSE : HMF_E_VALIDATION,
                     r.describe());
  }
  *out = new hmf_scenario{std::move(*r.scenario), {}};
  return HMF_OK;
}

#define HMF_REQUIRE(cond)                                                 \
  do {                                                                    \
    if (!(cond)) return set_error(HMF_E_INVALID_ARGUMENT, "null argument: " #cond); \
  } while (0)

}  // namespace

extern "C" {

const char* hmf_version(void) { return "0.1.0"; }

const char* hmf_last_error(void) { return g_last_error.c_str(); }

void hmf_string_free(char* s) { std::free(s); }

hmf_status hmf_scenario_load(const char* path, hmf_scenario** out) {
  return guarded([&] {
    HMF_REQUIRE(path && out);
    return from_load(hmflow::load_scenario(path), out);
  });
}

hmf_status hmf_scenario_parse(const char* text, size_t len, hmf_scenario** out) {
  return guarded([&] {
    HMF_REQUIRE(text && out);
    return from_load(hmflow::parse_scenario(std::string_view(text, len)), out);
  });
}

hmf_status hmf_scenario_clone(const hmf_scenario* s, hmf_scenario** out) {
  return guarded([&] {
    HMF_REQUIRE(s && out);
    *out = new hmf_scenario(*s);
    return HMF_OK;
  });
}

void hmf_scenario_free(hmf_scenario* s) { delete s; }

hmf_status hmf_scenario_override(hmf_scenario* s, const char* key,
                                 const char* value) {
  return guarded([&] {
    HMF_REQUIRE(s && key && value);
    auto r = hmflow::apply_overrides(s->scenario, {{key, value}});
    if (!r.ok()) return set_error(HMF_E_VALIDATION, r.describe());
    s->scenario = std::move(*r.scenario);
    s->overrides.emplace_back(key, value);
    return HMF_OK;
  });
}

hmf_status hmf_scenario_name(const hmf_scenario* s, char** out) {
  return guarded([&] {
    HMF_REQUIRE(s && out);
    return give(s->scenario.name, out);
  });
}

hmf_status hmf_scenario_to_json(const hmf_scenario* s, char** out) {
  return guarded([&] {
    HMF_REQUIRE(s && out);
    return give(hmflow::write_scenario(s->scenario), out);
  });
}

hmf_status hmf_scenario_digest(const hmf_scenario* s, char** out) {
  return guarded([&] {
    HMF_REQUIRE(s && out);
    return give(hmflow::scenario_digest(s->scenario), out);
  });
}

hmf_status hmf_run_execute(const hmf_scenario* s, int record_trace,
                           hmf_run** out) {
  return guarded([&] {
    HMF_REQUIRE(s && out);
    hmflow::RunOptions opt;
    opt.record_trace = record_trace != 0;
    opt.overrides = s->overrides;
    *out = new hmf_run{hmflow::run_scenario(s->scenario, opt)};
    return HMF_OK;
  });
}

void hmf_run_free(hmf_run* r) { delete r; }

hmf_status hmf_run_trace(const hmf_run* r, char** out) {
  return guarded([&] {
    HMF_REQUIRE(r && out);
    return give(r->result.trace.to_ndjson(), out);
  });
}

hmf_status hmf_run_summary_json(const hmf_run* r, char** out) {
  return guarded([&] {
    HMF_REQUIRE(r && out);
    return give(hmflow::summary_to_json(r->result.summary).dump(2) + "\n", out);
  });
}

hmf_status hmf_run_replay_matches(const hmf_run* r, int* out) {
  return guarded([&] {
    HMF_REQUIRE(r && out);
    if (r->result.trace.header.is_null()) {
      return set_error(HMF_E_PRECONDITION, "run was executed without a trace");
    }
    *out = hmflow::summarize_trace(r->result.trace) == r->result.summary ? 1 : 0;
    return HMF_OK;
  });
}

hmf_status hmf_trace_summary_json(const char* ndjson, size_t len, char** out) {
  return guarded([&] {
    HMF_REQUIRE(ndjson && out);
    const auto trace = hmflow::parse_trace(std::string_view(ndjson, len));
    return give(hmflow::summary_to_json(hmflow::summarize_trace(trace)).dump(2) + "\n",
                out);
  });
}

hmf_status hmf_report_render(const char* ndjson, size_t len, const char* format,
                             char** out) {
  return guarded([&] {
    HMF_REQUIRE(ndjson && format && out);
    const auto fmt = hmflow::report_format_from_string(format);
    if (!fmt) {
      return set_error(HMF_E_INVALID_ARGUMENT,
                       std::string("unknown report format '") + format +
                           "', expected 'table' or 'csv'");
    }
    const auto trace = hmflow::parse_trace(std::string_view(ndjson, len));
    nlohmann::json doc = nlohmann::json::object();
    nlohmann::json order = nlohmann::json::array();
    for (const auto& t : hmflow::build_report(trace)) {
      doc[t.name] = hmflow::render(t, *fmt);
      order.push_back(t.name);
    }
    doc["order"] = std::move(order);
    return give(doc.dump(), out);
  });
}

hmf_status hmf_partition(int n, double lambda, int* n_human, int* n_machine) {
  return guarded([&] {
    HMF_REQUIRE(n_human && n_machine);
    const auto [h, m] = hmflow::partition(n, lambda);
    *n_human = h;
    *n_machine = m;
    return HMF_OK;
  });
}

hmf_status hmf_majority_accuracy(double p, int w, int categories, double* out) {
  return guarded([&] {
    HMF_REQUIRE(out);
    *out = hmflow::majority_accuracy_analytic(p, w, categories);
    return HMF_OK;
  });
}

hmf_status hmf_invert_majority_accuracy(double target, int w, int categories,
                                        double* out) {
  return guarded([&] {
    HMF_REQUIRE(out);
    *out = hmflow::invert_majority_accuracy(target, w, categories);
    return HMF_OK;
  });
}

}  // extern "C"

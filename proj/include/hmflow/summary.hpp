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

// Run traces (NDJSON, schema "hmflow.trace/1") and the run summary.
//
// A summary holds integer tallies plus figures derived from them by
// `finalize`. The engine fills the tallies live; `summarize_trace` rebuilds
// them from trace records alone, and the two must agree exactly.

#ifndef HMFLOW_SUMMARY_HPP_
#define HMFLOW_SUMMARY_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "hmflow/sim.hpp"
#include "hmflow/types.hpp"
#include "json.hpp"

namespace hmflow {

inline constexpr const char* kTraceSchema = "hmflow.trace/1";

struct Trace {
  nlohmann::json header;
  std::vector<nlohmann::json> records;

  // Header line followed by one line per record, each newline-terminated.
  std::string to_ndjson() const;
};

// Throws Error(kParse) naming the line for malformed input and
// Error(kValidation) when the header is missing or has another schema.
Trace parse_trace(std::string_view text);

struct Verdict {
  bool met = false;
  double margin = 0.0;  // positive when met with room to spare

  bool operator==(const Verdict&) const = default;
};

struct SloVerdicts {
  Verdict accuracy;  // final consensus rate vs A*
  Verdict budget;    // spend vs B*, currency units
  Verdict deadline;  // finish vs T*, time units

  bool operator==(const SloVerdicts&) const = default;
};

struct NodeSummary {
  std::string id;
  int n = 0;
  int evaluated = 0;
  int evaluated_by_human = 0;
  int evaluated_by_machine = 0;
  int consensus = 0;
  int correct = 0;  // decisions equal to the hidden truth
  int rerouted = 0; // human microtasks moved to machines by the controller
  Money spent;
  Money budget;
  SimTime start;
  SimTime finish;
  SimTime deadline;
  double accuracy_target = 1.0;
  double final_lambda = 0.0;
  double final_incentive = 1.0;

  // Derived by finalize.
  int incomplete = 0;
  double completion = 0.0;
  double consensus_rate = 0.0;  // over all n microtasks
  double accuracy = 0.0;        // over all n microtasks
  SloVerdicts slo;

  bool operator==(const NodeSummary&) const = default;
};

struct ClassSummary {
  std::string name;
  double accuracy_p = 0.0;
  int replication_w = 1;
  int arrivals = 0;
  int issued = 0;
  int returned = 0;
  int timed_out = 0;
  int correct = 0;  // returned answers equal to the truth
  std::int64_t turnaround_ticks = 0;
  Money spent;

  // Derived by finalize.
  double answer_accuracy = 0.0;
  double mean_turnaround = 0.0;      // time units
  double predicted_majority = 0.0;   // analytic w-vote majority accuracy

  bool operator==(const ClassSummary&) const = default;
};

struct MachineSummary {
  std::string name;
  int batches = 0;
  int items = 0;
  int correct = 0;
  Money spent;

  double accuracy = 0.0;  // derived

  bool operator==(const MachineSummary&) const = default;
};

struct ActionEntry {
  SimTime at;
  std::string node;
  std::string action;
  std::string trigger;
  std::string detail;

  bool operator==(const ActionEntry&) const = default;
};

struct Summary {
  std::string scenario;
  std::uint64_t seed = 0;
  std::vector<NodeSummary> nodes;  // scenario order
  std::vector<ClassSummary> classes;
  std::vector<MachineSummary> machines;
  std::vector<ActionEntry> actions;
  Money budget;
  SimTime deadline;
  double accuracy_target = 1.0;
  SimTime finish;
  EventCounts events;

  // Derived by finalize from the node rows.
  int n = 0;
  int evaluated = 0;
  int incomplete = 0;
  int consensus = 0;
  int correct = 0;
  Money spent;
  double completion = 0.0;
  double consensus_rate = 0.0;
  double accuracy = 0.0;
  SloVerdicts slo;

  bool operator==(const Summary&) const = default;
};

bool operator==(const EventCounts& a, const EventCounts& b);

// Fills every derived field from the tallies.
void finalize(Summary& s);

// Rebuilds the summary from the trace alone.
Summary summarize_trace(const Trace& trace);

nlohmann::json summary_to_json(const Summary& s);

}  // namespace hmflow

#endif  // HMFLOW_SUMMARY_HPP_

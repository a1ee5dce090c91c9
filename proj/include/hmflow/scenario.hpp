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

// Scenario files: one JSON document, schema "hmflow.scenario/1". See
// docs/scenario_schema.md for the field reference.

#ifndef HMFLOW_SCENARIO_HPP_
#define HMFLOW_SCENARIO_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hmflow/agents.hpp"
#include "hmflow/controller.hpp"
#include "hmflow/graph.hpp"
#include "json.hpp"

namespace hmflow {

inline constexpr const char* kScenarioSchema = "hmflow.scenario/1";

struct ScriptEntry {
  enum class Op { kSetArrivalRate, kSetLambda, kSetIncentive };
  SimTime at;
  Op op = Op::kSetArrivalRate;
  std::string target;  // worker class for set_arrival_rate
  double value = 0.0;

  bool operator==(const ScriptEntry&) const = default;
};

const char* to_string(ScriptEntry::Op op);

struct Scenario {
  std::string name;
  std::uint64_t seed = 0;
  std::string time_unit = "minute";
  WorkflowGraph graph;
  std::vector<WorkerClass> worker_classes;
  std::vector<MachineAgentProfile> machine_agents;
  ControllerConfig controller;
  std::vector<ScriptEntry> script;

  bool operator==(const Scenario&) const = default;
};

// `location` is a JSON pointer into the document ("/controller/K"), or
// "line L, column C" for syntax errors, or the file path for I/O problems.
struct ScenarioIssue {
  std::string location;
  std::string message;
};

struct LoadResult {
  std::optional<Scenario> scenario;
  std::vector<ScenarioIssue> issues;

  bool ok() const { return scenario.has_value(); }
  std::string describe() const;
};

LoadResult parse_scenario(std::string_view text);
LoadResult scenario_from_json(const nlohmann::json& doc);
LoadResult load_scenario(const std::filesystem::path& path);

nlohmann::json scenario_to_json(const Scenario& s);
std::string write_scenario(const Scenario& s);

// Applies "dotted.path=value" overrides to scalar fields. Values are read as
// JSON literals, falling back to plain strings. The seed and every scalar
// present in the document can be overridden; unknown paths are issues.
LoadResult apply_overrides(const Scenario& s,
                           const std::vector<std::pair<std::string, std::string>>&
                               overrides);

// FNV-1a 64 of the canonical JSON form, as 16 hex digits.
std::string scenario_digest(const Scenario& s);

// Indices of the worker classes / machine agents a node may use.
std::vector<int> eligible_worker_classes(const Scenario& s,
                                         const WorkflowNode& node);
std::vector<int> eligible_machine_agents(const Scenario& s,
                                         const WorkflowNode& node);

}  // namespace hmflow

#endif  // HMFLOW_SCENARIO_HPP_

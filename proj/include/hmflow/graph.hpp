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

// Task dependency graph: nodes are data-parallel microtask sets tagged with
// the kind of agent allowed to execute them; edges are execution order.

#ifndef HMFLOW_GRAPH_HPP_
#define HMFLOW_GRAPH_HPP_

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "hmflow/slo.hpp"

namespace hmflow {

enum class AgentTag { kHumanOnly, kMachineOnly, kEither };

const char* to_string(AgentTag tag);
std::optional<AgentTag> agent_tag_from_string(const std::string& s);

struct WorkflowNode {
  std::string id;
  std::string label;
  AgentTag agent_tag = AgentTag::kEither;
  std::optional<SloSpec> node_slo;
  int microtask_count = 1;
  // Answer domain shared by every microtask of the node.
  std::vector<std::string> categories;
  // Agents allowed to work on this node; empty means every declared agent.
  std::vector<std::string> worker_classes;
  std::vector<std::string> machine_agents;

  bool operator==(const WorkflowNode&) const = default;
};

struct WorkflowGraph {
  std::vector<WorkflowNode> nodes;
  std::vector<std::pair<std::string, std::string>> edges;
  SloSpec task_slo;

  const WorkflowNode* find(const std::string& id) const;
  bool operator==(const WorkflowGraph&) const = default;
};

struct Violation {
  enum class Kind { kDanglingEdge, kCycle, kDuplicateId, kInvalidNode };
  Kind kind;
  // Dangling edge: the missing endpoint. Cycle: the node sequence.
  // Duplicate: the repeated id. Invalid node: the node id.
  std::vector<std::string> nodes;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

ValidationReport validate(const WorkflowGraph& graph);

// Kahn's algorithm with ascending-id tie breaking. Throws
// Error(kPrecondition) if the graph does not validate.
std::vector<std::string> topological_order(const WorkflowGraph& graph);

// Nodes outside `completed` whose predecessors are all in `completed`.
// Throws Error(kNotFound) on unknown ids.
std::set<std::string> ready_nodes(const WorkflowGraph& graph,
                                  const std::set<std::string>& completed);

// Effective per-node objectives. Explicit node SLOs win. The rest share the
// remaining budget in proportion to microtask_count and receive deadlines at
// equal steps along the critical path (stage d of L ends at (d+1)/L * T*).
std::map<std::string, SloSpec> derive_node_slos(const WorkflowGraph& graph);

}  // namespace hmflow

#endif  // HMFLOW_GRAPH_HPP_

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

#include "hmflow/graph.hpp"

#include <algorithm>
#include <functional>
#include <queue>

namespace hmflow {

const char* to_string(AgentTag tag) {
  switch (tag) {
    case AgentTag::kHumanOnly:
      return "human_only";
    case AgentTag::kMachineOnly:
      return "machine_only";
    case AgentTag::kEither:
      return "either";
  }
  return "either";
}

std::optional<AgentTag> agent_tag_from_string(const std::string& s) {
  if (s == "human_only") return AgentTag::kHumanOnly;
  if (s == "machine_only") return AgentTag::kMachineOnly;
  if (s == "either") return AgentTag::kEither;
  return std::nullopt;
}

const WorkflowNode* WorkflowGraph::find(const std::string& id) const {
  for (const auto& n : nodes) {
    if (n.id == id) return &n;
  }
  return nullptr;
}

namespace {

using Adjacency = std::map<std::string, std::set<std::string>>;

// Adjacency over known node ids only; dangling edges are ignored here.
Adjacency successors(const WorkflowGraph& g) {
  Adjacency adj;
  for (const auto& n : g.nodes) adj[n.id];
  for (const auto& [from, to] : g.edges) {
    if (adj.count(from) && adj.count(to)) adj[from].insert(to);
  }
  return adj;
}

// Tarjan's strongly connected components.
std::vector<std::vector<std::string>> strongly_connected(const Adjacency& adj) {
  std::map<std::string, int> index, low;
  std::set<std::string> on_stack;
  std::vector<std::string> stack;
  std::vector<std::vector<std::string>> out;
  int counter = 0;

  std::function<void(const std::string&)> visit = [&](const std::string& v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack.insert(v);
    for (const auto& w : adj.at(v)) {
      if (!index.count(w)) {
        visit(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack.count(w)) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      std::vector<std::string> comp;
      std::string w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack.erase(w);
        comp.push_back(w);
      } while (w != v);
      out.push_back(std::move(comp));
    }
  };
  for (const auto& [v, _] : adj) {
    if (!index.count(v)) visit(v);
  }
  return out;
}

// A concrete cycle inside one component, starting at its smallest id and
// following the smallest in-component successor that closes the loop.
std::vector<std::string> cycle_in(const Adjacency& adj,
                                  const std::vector<std::string>& comp) {
  std::set<std::string> members(comp.begin(), comp.end());
  const std::string start = *members.begin();
  std::vector<std::string> path{start};
  std::set<std::string> seen{start};
  std::function<bool(const std::string&)> dfs = [&](const std::string& v) {
    for (const auto& w : adj.at(v)) {
      if (!members.count(w)) continue;
      if (w == start) return true;
      if (seen.count(w)) continue;
      seen.insert(w);
      path.push_back(w);
      if (dfs(w)) return true;
      path.pop_back();
    }
    return false;
  };
  dfs(start);
  return path;
}

}  // namespace

ValidationReport validate(const WorkflowGraph& graph) {
  ValidationReport report;
  std::set<std::string> ids;
  for (const auto& n : graph.nodes) {
    if (!ids.insert(n.id).second) {
      report.violations.push_back({Violation::Kind::kDuplicateId,
                                   {n.id},
                                   "duplicate node id '" + n.id + "'"});
    }
    if (n.microtask_count < 0) {
      report.violations.push_back(
          {Violation::Kind::kInvalidNode, {n.id},
           "node '" + n.id + "' must have microtask_count >= 0"});
    }
  }
  for (const auto& [from, to] : graph.edges) {
    for (const auto* end : {&from, &to}) {
      if (!ids.count(*end)) {
        report.violations.push_back(
            {Violation::Kind::kDanglingEdge, {*end},
             "edge (" + from + ", " + to + ") references unknown node '" +
                 *end + "'"});
      }
    }
  }
  const Adjacency adj = successors(graph);
  auto comps = strongly_connected(adj);
  std::sort(comps.begin(), comps.end(), [](auto a, auto b) {
    return *std::min_element(a.begin(), a.end()) <
           *std::min_element(b.begin(), b.end());
  });
  for (const auto& comp : comps) {
    const bool self_loop = comp.size() == 1 && adj.at(comp[0]).count(comp[0]);
    if (comp.size() < 2 && !self_loop) continue;
    auto cyc = cycle_in(adj, comp);
    std::string msg = "cycle:";
    for (const auto& v : cyc) msg += " " + v;
    report.violations.push_back(
        {Violation::Kind::kCycle, std::move(cyc), std::move(msg)});
  }
  return report;
}

std::vector<std::string> topological_order(const WorkflowGraph& graph) {
  const auto report = validate(graph);
  if (!report.ok()) {
    fail(ErrorCode::kPrecondition,
         "topological_order on invalid graph: " +
             report.violations.front().message);
  }
  const Adjacency adj = successors(graph);
  std::map<std::string, int> indegree;
  for (const auto& [v, _] : adj) indegree[v];
  for (const auto& [v, succ] : adj) {
    for (const auto& w : succ) ++indegree[w];
  }
  std::priority_queue<std::string, std::vector<std::string>, std::greater<>>
      ready;
  for (const auto& [v, d] : indegree) {
    if (d == 0) ready.push(v);
  }
  std::vector<std::string> order;
  while (!ready.empty()) {
    auto v = ready.top();
    ready.pop();
    order.push_back(v);
    for (const auto& w : adj.at(v)) {
      if (--indegree[w] == 0) ready.push(w);
    }
  }
  return order;
}

std::set<std::string> ready_nodes(const WorkflowGraph& graph,
                                  const std::set<std::string>& completed) {
  for (const auto& id : completed) {
    if (!graph.find(id)) {
      fail(ErrorCode::kNotFound, "unknown node id '" + id + "' in completed");
    }
  }
  std::map<std::string, std::set<std::string>> preds;
  for (const auto& n : graph.nodes) preds[n.id];
  for (const auto& [from, to] : graph.edges) preds[to].insert(from);
  std::set<std::string> out;
  for (const auto& n : graph.nodes) {
    if (completed.count(n.id)) continue;
    const auto& p = preds[n.id];
    if (std::all_of(p.begin(), p.end(),
                    [&](const auto& u) { return completed.count(u) > 0; })) {
      out.insert(n.id);
    }
  }
  return out;
}

std::map<std::string, SloSpec> derive_node_slos(const WorkflowGraph& graph) {
  const auto order = topological_order(graph);
  std::map<std::string, int> depth;
  for (const auto& v : order) depth[v] = 0;
  for (const auto& v : order) {
    for (const auto& [from, to] : graph.edges) {
      if (from == v) depth[to] = std::max(depth[to], depth[v] + 1);
    }
  }
  int stages = 0;
  for (const auto& [_, d] : depth) stages = std::max(stages, d + 1);

  const SloSpec& task = graph.task_slo;
  Money remaining = task.budget;
  std::int64_t split_count = 0;
  for (const auto& n : graph.nodes) {
    if (n.node_slo) {
      remaining -= n.node_slo->budget;
    } else {
      split_count += n.microtask_count;
    }
  }
  if (remaining.micros < 0) remaining = Money{};

  std::map<std::string, SloSpec> out;
  Money handed_out;
  std::string last_split;
  for (const auto& id : order) {
    const WorkflowNode& n = *graph.find(id);
    if (n.node_slo) {
      out[id] = *n.node_slo;
      continue;
    }
    SloSpec s;
    s.accuracy_target = task.accuracy_target;
    s.budget = Money{split_count > 0
                         ? static_cast<std::int64_t>(
                               static_cast<__int128>(remaining.micros) *
                               n.microtask_count / split_count)
                         : 0};
    s.deadline = SimTime{static_cast<std::int64_t>(
        static_cast<__int128>(task.deadline.ticks) * (depth[id] + 1) / stages)};
    handed_out += s.budget;
    last_split = id;
    out[id] = s;
  }
  // Flooring leaves a few micros over; the last split node absorbs them.
  if (!last_split.empty()) out[last_split].budget += remaining - handed_out;
  return out;
}

}  // namespace hmflow

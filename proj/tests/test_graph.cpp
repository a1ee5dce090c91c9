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


#include <algorithm>
#include <map>
#include <set>

#include "doctest.h"
#include "hmflow/graph.hpp"
#include "hmflow/sim.hpp"

using namespace hmflow;

namespace {

WorkflowGraph make(std::vector<std::string> ids,
                   std::vector<std::pair<std::string, std::string>> edges) {
  WorkflowGraph g;
  for (auto& id : ids) {
    WorkflowNode n;
    n.id = id;
    n.microtask_count = 10;
    g.nodes.push_back(n);
  }
  g.edges = std::move(edges);
  g.task_slo = {0.8, Money::from_currency(60.0), SimTime::from_units(1000)};
  return g;
}

bool respects_edges(const WorkflowGraph& g, const std::vector<std::string>& order) {
  std::map<std::string, std::size_t> pos;
  for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = i;
  if (pos.size() != g.nodes.size()) return false;
  for (const auto& [u, v] : g.edges) {
    if (pos.at(u) >= pos.at(v)) return false;
  }
  return true;
}

// Random DAG: edges only go from lower to higher positions of a shuffled
// id list, so the result is acyclic by construction.
WorkflowGraph random_dag(RngStream& rng, int n) {
  std::vector<std::string> ids;
  for (int i = 0; i < n; ++i) ids.push_back(std::string(1, static_cast<char>('A' + i)));
  for (int i = n - 1; i > 0; --i) {
    std::swap(ids[i], ids[rng.uniform_below(i + 1)]);
  }
  std::vector<std::pair<std::string, std::string>> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (rng.uniform01() < 0.35) edges.emplace_back(ids[i], ids[j]);
    }
  }
  auto sorted = ids;
  std::sort(sorted.begin(), sorted.end());
  return make(sorted, edges);
}

}  // namespace

TEST_CASE("validate: smallest DAG, 2-cycle, dangling edge") {
  CHECK(validate(make({"A", "B"}, {{"A", "B"}})).ok());

  auto r = validate(make({"A", "B"}, {{"A", "B"}, {"B", "A"}}));
  REQUIRE(r.violations.size() == 1);
  CHECK(r.violations[0].kind == Violation::Kind::kCycle);
  CHECK(r.violations[0].nodes == std::vector<std::string>{"A", "B"});

  r = validate(make({"A"}, {{"A", "X"}}));
  REQUIRE(r.violations.size() == 1);
  CHECK(r.violations[0].kind == Violation::Kind::kDanglingEdge);
  CHECK(r.violations[0].nodes == std::vector<std::string>{"X"});
}

TEST_CASE("validate enumerates every violation") {
  auto g = make({"A", "A", "B", "C"}, {{"B", "C"}, {"C", "B"}, {"Q", "A"}, {"A", "A"}});
  const auto r = validate(g);
  int dup = 0, dangling = 0, cycles = 0;
  for (const auto& v : r.violations) {
    dup += v.kind == Violation::Kind::kDuplicateId;
    dangling += v.kind == Violation::Kind::kDanglingEdge;
    cycles += v.kind == Violation::Kind::kCycle;
  }
  CHECK(dup == 1);
  CHECK(dangling == 1);
  CHECK(cycles == 2);  // self loop on A and B <-> C
}

TEST_CASE("validate rejects negative microtask counts") {
  auto g = make({"A"}, {});
  g.nodes[0].microtask_count = 0;
  CHECK(validate(g).ok());
  g.nodes[0].microtask_count = -1;
  REQUIRE_FALSE(validate(g).ok());
  CHECK(validate(g).violations[0].kind == Violation::Kind::kInvalidNode);
}

TEST_CASE("topological_order examples") {
  CHECK(topological_order(make({"A", "B", "C", "D"}, {{"A", "B"}, {"A", "C"}, {"C", "D"}})) ==
        std::vector<std::string>{"A", "B", "C", "D"});
  CHECK(topological_order(make({"A"}, {})) == std::vector<std::string>{"A"});
  CHECK(topological_order(make({"A", "B"}, {{"B", "A"}})) ==
        std::vector<std::string>{"B", "A"});
}

TEST_CASE("topological_order refuses invalid graphs") {
  try {
    topological_order(make({"A", "B"}, {{"A", "B"}, {"B", "A"}}));
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kPrecondition);
  }
}

TEST_CASE("ready_nodes examples") {
  const auto g = make({"A", "B"}, {{"A", "B"}});
  CHECK(ready_nodes(g, {}) == std::set<std::string>{"A"});
  CHECK(ready_nodes(g, {"A"}) == std::set<std::string>{"B"});
  CHECK(ready_nodes(g, {"A", "B"}).empty());
  try {
    ready_nodes(g, {"Z"});
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNotFound);
  }
}

TEST_CASE("property: generated DAGs up to 8 nodes") {
  auto rng = seeded_rng(7, "test/dag");
  for (int trial = 0; trial < 2000; ++trial) {
    const int n = 1 + static_cast<int>(rng.uniform_below(8));
    const auto g = random_dag(rng, n);
    CAPTURE(trial);
    REQUIRE(validate(g).ok());
    const auto order = topological_order(g);
    CHECK(respects_edges(g, order));

    // Staged execution visits every node exactly once.
    std::set<std::string> done;
    std::vector<std::string> visits;
    while (true) {
      const auto ready = ready_nodes(g, done);
      for (const auto& id : ready) CHECK(done.count(id) == 0);
      if (ready.empty()) break;
      for (const auto& id : ready) {
        visits.push_back(id);
        done.insert(id);
      }
    }
    CHECK(visits.size() == g.nodes.size());
    CHECK(done.size() == g.nodes.size());
  }
}

TEST_CASE("property: staged execution stalls on cycles") {
  auto rng = seeded_rng(8, "test/cyclic");
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform_below(7));
    auto g = random_dag(rng, n);
    // Close a loop through two random distinct nodes joined by a fresh path.
    const auto& a = g.nodes[rng.uniform_below(n)].id;
    std::string b = a;
    while (b == a) b = g.nodes[rng.uniform_below(n)].id;
    g.edges.emplace_back(a, b);
    g.edges.emplace_back(b, a);
    CHECK_FALSE(validate(g).ok());
    std::set<std::string> done;
    while (true) {
      const auto ready = ready_nodes(g, done);
      if (ready.empty()) break;
      done.insert(ready.begin(), ready.end());
    }
    CHECK(done.size() < g.nodes.size());
  }
}

TEST_CASE("derived node SLOs split budget by size and deadline by stage") {
  auto g = make({"A", "B", "C"}, {{"A", "B"}, {"A", "C"}});
  g.nodes[0].microtask_count = 100;
  g.nodes[1].microtask_count = 300;
  g.nodes[2].microtask_count = 200;
  const auto slos = derive_node_slos(g);
  CHECK(slos.at("A").budget == Money::from_currency(10));
  CHECK(slos.at("B").budget == Money::from_currency(30));
  CHECK(slos.at("C").budget == Money::from_currency(20));
  CHECK(slos.at("A").deadline == SimTime::from_units(500));
  CHECK(slos.at("B").deadline == SimTime::from_units(1000));
  CHECK(slos.at("C").deadline == SimTime::from_units(1000));
  CHECK(slos.at("B").accuracy_target == doctest::Approx(0.8));
}

TEST_CASE("explicit node SLOs win and the rest share what is left") {
  auto g = make({"A", "B", "C"}, {{"A", "B"}, {"B", "C"}});
  g.nodes[1].node_slo = SloSpec{0.95, Money::from_currency(15), SimTime::from_units(900)};
  g.nodes[0].microtask_count = 1;
  g.nodes[2].microtask_count = 2;
  const auto slos = derive_node_slos(g);
  CHECK(slos.at("B") == *g.nodes[1].node_slo);
  // 45 over sizes 1 and 2; flooring leftovers go to the last split node.
  CHECK(slos.at("A").budget == Money::from_currency(15));
  CHECK(slos.at("C").budget == Money::from_currency(30));
  CHECK(slos.at("A").deadline.ticks == 1000 * kTicksPerUnit / 3);
  CHECK(slos.at("C").deadline == SimTime::from_units(1000));

  Money total;
  for (const auto& [_, s] : slos) total += s.budget;
  CHECK(total == g.task_slo.budget);
}

TEST_CASE("agent tag names round-trip") {
  for (auto t : {AgentTag::kHumanOnly, AgentTag::kMachineOnly, AgentTag::kEither}) {
    CHECK(agent_tag_from_string(to_string(t)) == t);
  }
  CHECK_FALSE(agent_tag_from_string("robot").has_value());
}

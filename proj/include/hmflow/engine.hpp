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

// Workflow execution on the discrete-event simulator.
//
// Nodes start once all predecessors have closed, in ascending id order among
// those ready at the same instant. Each node runs its own control loop:
// partition by lambda, issue w-tasks to arriving workers and batches to
// machine agents, poll K times up to the node deadline, aggregate, and apply
// corrective actions. The final poll closes the node and reports whatever is
// left unevaluated.

#ifndef HMFLOW_ENGINE_HPP_
#define HMFLOW_ENGINE_HPP_

#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hmflow/scenario.hpp"
#include "hmflow/summary.hpp"

namespace hmflow {

struct LedgerView {
  std::string_view owner;  // "task" or a node id
  Money spent;
  Money committed;
  Money budget;
};

// Called after every simulator event with the task ledger first, then one
// view per started node.
using LedgerObserver =
    std::function<void(SimTime now, const std::vector<LedgerView>& ledgers)>;

struct RunOptions {
  bool record_trace = true;
  // Recorded verbatim in the trace header.
  std::vector<std::pair<std::string, std::string>> overrides;
  LedgerObserver observer;
};

struct RunResult {
  Trace trace;
  Summary summary;
};

// Throws Error(kValidation) when the scenario graph is invalid. SLO misses
// are reported in the summary, never thrown.
RunResult run_scenario(const Scenario& scenario, const RunOptions& options = {});

}  // namespace hmflow

#endif  // HMFLOW_ENGINE_HPP_

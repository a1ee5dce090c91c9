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

#include "hmflow/summary.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <utility>

#include "hmflow/aggregation.hpp"
#include "hmflow/scenario.hpp"

namespace hmflow {

using nlohmann::json;

bool operator==(const EventCounts& a, const EventCounts& b) {
  return a.scheduled == b.scheduled && a.fired == b.fired &&
         a.cancelled == b.cancelled && a.past_horizon == b.past_horizon;
}

std::string Trace::to_ndjson() const {
  std::string out = header.dump();
  out += '\n';
  for (const auto& r : records) {
    out += r.dump();
    out += '\n';
  }
  return out;
}

Trace parse_trace(std::string_view text) {
  Trace t;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool have_header = false;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    json rec;
    try {
      rec = json::parse(line.begin(), line.end());
    } catch (const json::parse_error& e) {
      fail(ErrorCode::kParse,
           "trace line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!rec.is_object() || !rec.contains("kind")) {
      fail(ErrorCode::kParse, "trace line " + std::to_string(line_no) +
                                  ": record without a kind");
    }
    if (!have_header) {
      if (rec["kind"] != "header") {
        fail(ErrorCode::kValidation, "trace does not start with a header");
      }
      if (rec.value("schema", "") != kTraceSchema) {
        fail(ErrorCode::kValidation, std::string("unsupported trace schema, expected ") +
                                         kTraceSchema);
      }
      t.header = std::move(rec);
      have_header = true;
      continue;
    }
    t.records.push_back(std::move(rec));
  }
  if (!have_header) fail(ErrorCode::kValidation, "trace is empty");
  return t;
}

namespace {

double ratio(int num, int den, double if_empty) {
  return den > 0 ? static_cast<double>(num) / den : if_empty;
}

SloVerdicts verdicts(double consensus_rate, double target, Money spent,
                     Money budget, int incomplete, SimTime finish,
                     SimTime deadline) {
  SloVerdicts v;
  v.accuracy = {consensus_rate >= target, consensus_rate - target};
  v.budget = {spent <= budget, (budget - spent).currency()};
  v.deadline = {incomplete == 0 && finish <= deadline,
                (deadline - finish).units()};
  return v;
}

}  // namespace

void finalize(Summary& s) {
  s.n = s.evaluated = s.consensus = s.correct = 0;
  s.spent = Money{};
  s.finish = SimTime{};
  for (auto& n : s.nodes) {
    n.incomplete = n.n - n.evaluated;
    // An empty node has nothing left to do.
    n.completion = ratio(n.evaluated, n.n, 1.0);
    n.consensus_rate = ratio(n.consensus, n.n, 1.0);
    n.accuracy = ratio(n.correct, n.n, 1.0);
    n.slo = verdicts(n.consensus_rate, n.accuracy_target, n.spent, n.budget,
                     n.incomplete, n.finish, n.deadline);
    s.n += n.n;
    s.evaluated += n.evaluated;
    s.consensus += n.consensus;
    s.correct += n.correct;
    s.spent += n.spent;
    s.finish = std::max(s.finish, n.finish);
  }
  s.incomplete = s.n - s.evaluated;
  s.completion = ratio(s.evaluated, s.n, 1.0);
  s.consensus_rate = ratio(s.consensus, s.n, 1.0);
  s.accuracy = ratio(s.correct, s.n, 1.0);
  s.slo = verdicts(s.consensus_rate, s.accuracy_target, s.spent, s.budget,
                   s.incomplete, s.finish, s.deadline);
  for (auto& c : s.classes) {
    c.answer_accuracy = ratio(c.correct, c.returned, 0.0);
    c.mean_turnaround =
        c.returned > 0
            ? static_cast<double>(c.turnaround_ticks) / c.returned / kTicksPerUnit
            : 0.0;
    const bool analytic = c.replication_w % 2 == 1 && c.replication_w <= 9 &&
                          c.accuracy_p >= 0.0 && c.accuracy_p <= 1.0;
    c.predicted_majority =
        analytic ? majority_accuracy_analytic(c.accuracy_p, c.replication_w, 2)
                 : 0.0;
  }
  for (auto& m : s.machines) m.accuracy = ratio(m.correct, m.items, 0.0);
}

Summary summarize_trace(const Trace& trace) {
  const LoadResult loaded = scenario_from_json(trace.header.at("config"));
  if (!loaded.ok()) {
    fail(ErrorCode::kValidation,
         "trace header carries an invalid scenario: " + loaded.describe());
  }
  const Scenario& sc = *loaded.scenario;
  Summary s;
  s.scenario = sc.name;
  s.seed = sc.seed;
  s.budget = sc.graph.task_slo.budget;
  s.deadline = sc.graph.task_slo.deadline;
  s.accuracy_target = sc.graph.task_slo.accuracy_target;

  std::map<std::string, std::size_t> node_at, class_at, machine_at;
  for (const auto& n : sc.graph.nodes) {
    NodeSummary ns;
    ns.id = n.id;
    node_at[n.id] = s.nodes.size();
    s.nodes.push_back(std::move(ns));
  }
  for (const auto& c : sc.worker_classes) {
    ClassSummary cs;
    cs.name = c.name;
    cs.accuracy_p = c.accuracy_p;
    cs.replication_w = sc.controller.replication_w;
    class_at[c.name] = s.classes.size();
    s.classes.push_back(std::move(cs));
  }
  for (const auto& m : sc.machine_agents) {
    MachineSummary ms;
    ms.name = m.name;
    machine_at[m.name] = s.machines.size();
    s.machines.push_back(std::move(ms));
  }

  // Latest (status is consensus, decision is correct) per microtask.
  std::map<std::pair<std::string, int>, std::pair<bool, bool>> latest;

  for (const auto& r : trace.records) {
    const std::string kind = r.at("kind").get<std::string>();
    const SimTime t{r.at("t").get<std::int64_t>()};
    if (kind == "node_start") {
      auto& n = s.nodes.at(node_at.at(r.at("node")));
      n.n = r.at("n").get<int>();
      n.start = t;
      n.deadline = SimTime{r.at("deadline").get<std::int64_t>()};
      n.budget = Money{r.at("budget").get<std::int64_t>()};
      n.accuracy_target = r.at("accuracy_target").get<double>();
      n.final_lambda = r.at("lambda").get<double>();
    } else if (kind == "consensus") {
      auto& n = s.nodes.at(node_at.at(r.at("node")));
      const auto key = std::make_pair(n.id, r.at("microtask").get<int>());
      latest[key] = {r.at("status") == to_string(ConsensusStatus::kConsensus),
                     r.at("correct").get<bool>()};
      if (r.at("first").get<bool>()) {
        ++n.evaluated;
        ++(r.at("route") == to_string(Route::kHuman) ? n.evaluated_by_human
                                                     : n.evaluated_by_machine);
      }
    } else if (kind == "ledger") {
      if (r.at("op") == "charge") {
        s.nodes.at(node_at.at(r.at("node"))).spent +=
            Money{r.at("amount").get<std::int64_t>()};
      }
    } else if (kind == "arrival") {
      ++s.classes.at(class_at.at(r.at("class"))).arrivals;
    } else if (kind == "assign") {
      ++s.classes.at(class_at.at(r.at("class"))).issued;
    } else if (kind == "return") {
      auto& c = s.classes.at(class_at.at(r.at("class")));
      ++c.returned;
      if (r.at("correct").get<bool>()) ++c.correct;
      c.turnaround_ticks += r.at("turnaround").get<std::int64_t>();
      c.spent += Money{r.at("reward").get<std::int64_t>()};
    } else if (kind == "timeout") {
      ++s.classes.at(class_at.at(r.at("class"))).timed_out;
    } else if (kind == "machine_done") {
      auto& m = s.machines.at(machine_at.at(r.at("agent")));
      const auto items = static_cast<int>(r.at("items").size());
      ++m.batches;
      m.items += items;
      m.correct += r.at("correct").get<int>();
      m.spent += static_cast<std::int64_t>(items) *
                 Money{r.at("cost").get<std::int64_t>()};
    } else if (kind == "action") {
      auto& n = s.nodes.at(node_at.at(r.at("node")));
      n.rerouted += r.at("rerouted").get<int>();
      s.actions.push_back({t, n.id, r.at("action").get<std::string>(),
                           r.at("trigger").get<std::string>(),
                           r.at("detail").get<std::string>()});
    } else if (kind == "node_end") {
      auto& n = s.nodes.at(node_at.at(r.at("node")));
      n.finish = t;
      n.final_lambda = r.at("lambda").get<double>();
      n.final_incentive = r.at("incentive").get<double>();
    } else if (kind == "run_end") {
      const auto& e = r.at("events");
      s.events.scheduled = e.at("scheduled").get<std::uint64_t>();
      s.events.fired = e.at("fired").get<std::uint64_t>();
      s.events.cancelled = e.at("cancelled").get<std::uint64_t>();
      s.events.past_horizon = e.at("past_horizon").get<std::uint64_t>();
    }
  }
  for (const auto& [key, v] : latest) {
    auto& n = s.nodes.at(node_at.at(key.first));
    if (v.first) ++n.consensus;
    if (v.second) ++n.correct;
  }
  finalize(s);
  return s;
}

namespace {

json verdict_json(const Verdict& v) {
  return {{"met", v.met}, {"margin", v.margin}};
}

json slo_json(const SloVerdicts& v) {
  return {{"accuracy", verdict_json(v.accuracy)},
          {"budget", verdict_json(v.budget)},
          {"deadline", verdict_json(v.deadline)}};
}

}  // namespace

json summary_to_json(const Summary& s) {
  json nodes = json::array();
  for (const auto& n : s.nodes) {
    nodes.push_back({{"id", n.id},
                     {"n", n.n},
                     {"evaluated", n.evaluated},
                     {"evaluated_by_human", n.evaluated_by_human},
                     {"evaluated_by_machine", n.evaluated_by_machine},
                     {"incomplete", n.incomplete},
                     {"consensus", n.consensus},
                     {"correct", n.correct},
                     {"rerouted", n.rerouted},
                     {"completion", n.completion},
                     {"consensus_rate", n.consensus_rate},
                     {"accuracy", n.accuracy},
                     {"spent", n.spent.currency()},
                     {"budget", n.budget.currency()},
                     {"start", n.start.units()},
                     {"finish", n.finish.units()},
                     {"deadline", n.deadline.units()},
                     {"accuracy_target", n.accuracy_target},
                     {"final_lambda", n.final_lambda},
                     {"final_incentive", n.final_incentive},
                     {"slo", slo_json(n.slo)}});
  }
  json classes = json::array();
  for (const auto& c : s.classes) {
    classes.push_back({{"name", c.name},
                       {"accuracy_p", c.accuracy_p},
                       {"replication_w", c.replication_w},
                       {"arrivals", c.arrivals},
                       {"issued", c.issued},
                       {"returned", c.returned},
                       {"timed_out", c.timed_out},
                       {"correct", c.correct},
                       {"answer_accuracy", c.answer_accuracy},
                       {"predicted_majority", c.predicted_majority},
                       {"mean_turnaround", c.mean_turnaround},
                       {"spent", c.spent.currency()}});
  }
  json machines = json::array();
  for (const auto& m : s.machines) {
    machines.push_back({{"name", m.name},
                        {"batches", m.batches},
                        {"items", m.items},
                        {"correct", m.correct},
                        {"accuracy", m.accuracy},
                        {"spent", m.spent.currency()}});
  }
  json actions = json::array();
  for (const auto& a : s.actions) {
    actions.push_back({{"t", a.at.units()},
                       {"node", a.node},
                       {"action", a.action},
                       {"trigger", a.trigger},
                       {"detail", a.detail}});
  }
  return {{"scenario", s.scenario},
          {"seed", s.seed},
          {"n", s.n},
          {"evaluated", s.evaluated},
          {"incomplete", s.incomplete},
          {"consensus", s.consensus},
          {"correct", s.correct},
          {"completion", s.completion},
          {"consensus_rate", s.consensus_rate},
          {"accuracy", s.accuracy},
          {"spent", s.spent.currency()},
          {"budget", s.budget.currency()},
          {"finish", s.finish.units()},
          {"deadline", s.deadline.units()},
          {"accuracy_target", s.accuracy_target},
          {"slo", slo_json(s.slo)},
          {"events",
           {{"scheduled", s.events.scheduled},
            {"fired", s.events.fired},
            {"cancelled", s.events.cancelled},
            {"past_horizon", s.events.past_horizon}}},
          {"nodes", std::move(nodes)},
          {"classes", std::move(classes)},
          {"machines", std::move(machines)},
          {"actions", std::move(actions)}};
}

}  // namespace hmflow

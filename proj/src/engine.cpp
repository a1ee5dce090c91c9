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

#include "hmflow/engine.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <unordered_map>

#include "hmflow/aggregation.hpp"
#include "hmflow/controller.hpp"

namespace hmflow {
namespace {

using nlohmann::json;

constexpr SimTime kForever{std::numeric_limits<std::int64_t>::max()};
constexpr Duration kOneTick{1};

struct MachineWork {
  std::vector<int> agents;  // profiles holding a replica
  std::vector<Category> answers;
  int outstanding = 0;
};

struct TimeoutTimer {
  SimTime at;
  EventId event = 0;
};

struct NodeRun {
  int index = 0;
  const WorkflowNode* node = nullptr;
  SloSpec slo;
  BudgetLedger ledger;
  bool started = false;
  bool closed = false;
  SimTime start;
  SimTime deadline;
  SimTime finish;
  std::vector<SimTime> polls;
  AnswerDomain domain;
  std::vector<Microtask> microtasks;
  std::vector<Category> truth;
  std::vector<std::optional<ConsensusResult>> results;
  std::map<MicrotaskId, WTask> wtasks;
  std::map<MicrotaskId, TimeoutTimer> timers;
  std::map<MicrotaskId, MachineWork> machine_work;
  std::set<MicrotaskId> human_unassigned;
  std::set<MicrotaskId> machine_waiting;
  std::set<MicrotaskId> open_wtasks;
  std::vector<int> classes;   // eligible worker classes
  std::vector<int> machines;  // eligible machine agents
  std::vector<char> admits_class;
  ControllerState ctl;
  int evaluated = 0;
  int by_human = 0;
  int by_machine = 0;
  int completed_since_poll = 0;
  int rerouted = 0;

  bool active() const { return started && !closed; }
  int n() const { return static_cast<int>(microtasks.size()); }
};

struct Batch {
  int agent = 0;
  int node = 0;
  std::vector<MicrotaskId> items;
  Money cost_each;
  bool settled = false;
};

struct ArrivalChain {
  std::optional<EventId> event;
  double rate = 0.0;
};

json mt(const NodeRun& n, MicrotaskId id) {
  return {{"node", n.node->id}, {"microtask", id}};
}

class Engine {
 public:
  Engine(const Scenario& s, const RunOptions& o)
      : sc_(s),
        cfg_(s.controller),
        opt_(o),
        sim_(s.graph.task_slo.deadline),
        task_ledger_(s.graph.task_slo.budget),
        pool_(s.worker_classes, s.controller.elasticity) {
    const auto report = validate(s.graph);
    if (!report.ok()) {
      fail(ErrorCode::kValidation, report.violations.front().message);
    }
    const auto slos = derive_node_slos(s.graph);
    for (std::size_t i = 0; i < s.graph.nodes.size(); ++i) {
      const auto& wn = s.graph.nodes[i];
      NodeRun n;
      n.index = static_cast<int>(i);
      n.node = &wn;
      n.slo = slos.at(wn.id);
      n.ledger = BudgetLedger(n.slo.budget);
      n.classes = eligible_worker_classes(s, wn);
      n.machines = eligible_machine_agents(s, wn);
      n.admits_class.assign(s.worker_classes.size(), 0);
      for (int c : n.classes) n.admits_class[c] = 1;
      nodes_.push_back(std::move(n));
      index_of_[wn.id] = static_cast<int>(i);
    }
    for (const auto& id : topological_order(s.graph)) {
      topo_.push_back(index_of_.at(id));
    }
    for (const auto& c : s.worker_classes) {
      arrivals_rng_.push_back(seeded_rng(s.seed, "arrivals/" + c.name));
      service_rng_.push_back(seeded_rng(s.seed, "service/" + c.name));
      answers_rng_.push_back(seeded_rng(s.seed, "answers/" + c.name));
      retention_rng_.push_back(seeded_rng(s.seed, "retention/" + c.name));
      ClassSummary cs;
      cs.name = c.name;
      cs.accuracy_p = c.accuracy_p;
      cs.replication_w = cfg_.replication_w;
      classes_.push_back(cs);
    }
    chains_.resize(s.worker_classes.size());
    for (const auto& m : s.machine_agents) {
      machine_rng_.push_back(seeded_rng(s.seed, "machine/" + m.name));
      MachineSummary ms;
      ms.name = m.name;
      machines_.push_back(ms);
    }
    machine_busy_.assign(s.machine_agents.size(), 0);
  }

  RunResult run() {
    RunResult out;
    if (opt_.record_trace) {
      json overrides = json::array();
      for (const auto& [k, v] : opt_.overrides) overrides.push_back({k, v});
      trace_.header = {{"kind", "header"},
                       {"schema", kTraceSchema},
                       {"scenario", sc_.name},
                       {"scenario_digest", scenario_digest(sc_)},
                       {"seed", sc_.seed},
                       {"time_unit", sc_.time_unit},
                       {"ticks_per_unit", kTicksPerUnit},
                       {"config", scenario_to_json(sc_)},
                       {"overrides", std::move(overrides)}};
    }
    for (std::size_t i = 0; i < sc_.script.size(); ++i) {
      sim_.schedule(sc_.script[i].at,
                    ScenarioScriptPayload{static_cast<int>(i)});
    }
    start_ready_nodes();
    after_event();
    while (sim_.has_next()) {
      const SimEvent ev = sim_.step();
      std::visit([this](const auto& p) { handle(p); }, ev.payload);
      after_event();
    }
    // Nodes close at their final poll, which never lies past the horizon,
    // and closing a node starts its successors.
    for (const auto& n : nodes_) {
      if (!n.closed) fail(ErrorCode::kInternal, "node '" + n.node->id + "' left open");
    }
    sim_.finish();
    const auto& c = sim_.counts();
    emit({{"kind", "run_end"},
          {"events",
           {{"scheduled", c.scheduled},
            {"fired", c.fired},
            {"cancelled", c.cancelled},
            {"past_horizon", c.past_horizon}}},
          {"spent", task_ledger_.spent().micros},
          {"committed", task_ledger_.committed().micros}});
    out.summary = build_summary();
    out.trace = std::move(trace_);
    return out;
  }

 private:
  SimTime now() const { return sim_.now(); }

  void emit(json rec) {
    if (!opt_.record_trace) return;
    rec["t"] = now().ticks;
    trace_.records.push_back(std::move(rec));
  }

  void ledger_record(const char* op, const NodeRun& n, Money amount) {
    if (!opt_.record_trace) return;
    emit({{"kind", "ledger"},
          {"op", op},
          {"node", n.node->id},
          {"amount", amount.micros},
          {"node_spent", n.ledger.spent().micros},
          {"node_committed", n.ledger.committed().micros},
          {"task_spent", task_ledger_.spent().micros},
          {"task_committed", task_ledger_.committed().micros}});
  }

  bool can_afford(const NodeRun& n, Money amount) const {
    return n.ledger.can_afford(amount) && task_ledger_.can_afford(amount);
  }
  void commit(NodeRun& n, Money amount) {
    n.ledger.commit(amount);
    task_ledger_.commit(amount);
  }
  void charge(NodeRun& n, Money amount) {
    n.ledger.charge(amount);
    task_ledger_.charge(amount);
  }
  void release(NodeRun& n, Money amount) {
    n.ledger.release(amount);
    task_ledger_.release(amount);
  }
  Money headroom(const NodeRun& n) const {
    return std::min(n.ledger.headroom(), task_ledger_.headroom());
  }
  Money offer(const NodeRun& n) const {
    return offered_reward(cfg_.reward_per_assignment, n.ctl.incentive);
  }
  const std::string& label(const NodeRun& n, Category c) const {
    return (*n.domain)[c];
  }

  // --- node lifecycle ---------------------------------------------------

  void start_ready_nodes() {
    std::set<std::string> closed;
    for (const auto& n : nodes_) {
      if (n.closed) closed.insert(n.node->id);
    }
    const auto ready = ready_nodes(sc_.graph, closed);
    for (int ni : topo_) {
      NodeRun& n = nodes_[ni];
      if (!n.started && ready.count(n.node->id)) start_node(n);
    }
  }

  void start_node(NodeRun& n) {
    n.started = true;
    n.start = now();
    n.deadline = std::clamp(n.slo.deadline, now(), sim_.horizon());
    n.ctl.lambda = cfg_.initial_lambda;
    n.ctl.incentive = incentive_floor_;
    n.domain = make_answer_domain(n.node->categories);
    const int count = std::max(0, n.node->microtask_count);
    RngStream truth_rng = seeded_rng(sc_.seed, "truth/" + n.node->id);
    for (int i = 0; i < count; ++i) {
      Microtask m;
      m.id = i;
      m.node_id = n.node->id;
      m.payload_ref = n.node->id + "/" + std::to_string(i);
      m.answer_domain = n.domain;
      n.microtasks.push_back(std::move(m));
      n.truth.push_back(static_cast<Category>(
          truth_rng.uniform_below(n.domain->size())));
    }
    n.results.resize(count);

    int humans = 0;
    const bool has_h = !n.classes.empty();
    const bool has_m = !n.machines.empty();
    switch (n.node->agent_tag) {
      case AgentTag::kHumanOnly:
        humans = count;
        break;
      case AgentTag::kMachineOnly:
        humans = 0;
        break;
      case AgentTag::kEither:
        humans = !has_m ? count : !has_h ? 0
                                         : partition(count, n.ctl.lambda).first;
        break;
    }
    for (int i = 0; i < count; ++i) {
      if (i < humans) {
        n.human_unassigned.insert(i);
      } else {
        n.microtasks[i].route = Route::kMachine;
        n.machine_waiting.insert(i);
      }
    }
    emit({{"kind", "node_start"},
          {"node", n.node->id},
          {"n", count},
          {"human", humans},
          {"machine", count - humans},
          {"lambda", n.ctl.lambda},
          {"categories", n.domain->size()},
          {"deadline", n.deadline.ticks},
          {"budget", n.slo.budget.micros},
          {"accuracy_target", n.slo.accuracy_target}});
    if (count == 0) {
      close_node(n);
      return;
    }
    n.polls = polling_instants(n.start, n.deadline, cfg_.K);
    for (int k = 0; k < cfg_.K; ++k) {
      sim_.schedule(n.polls[k], PollTickPayload{n.index, k});
    }
  }

  bool node_complete(const NodeRun& n) const {
    if (n.evaluated < n.n()) return false;
    if (!n.human_unassigned.empty() || !n.machine_waiting.empty()) return false;
    for (const auto& [id, wt] : n.wtasks) {
      if (wt.state != WTaskState::kDone) return false;
    }
    for (const auto& [id, mw] : n.machine_work) {
      if (mw.outstanding > 0) return false;
    }
    return true;
  }

  void close_node(NodeRun& n) {
    for (auto& [id, wt] : n.wtasks) {
      cancel_timer(n, id);
      if (wt.count(AssignmentOutcome::kPending) == 0) continue;
      for (const auto& e : expire_overdue({&wt}, kForever)) {
        settle_expired(n, e, "node_closed");
      }
    }
    for (auto& b : batches_) {
      if (b.node != n.index || b.settled) continue;
      b.settled = true;
      const Money total = static_cast<std::int64_t>(b.items.size()) * b.cost_each;
      release(n, total);
      for (MicrotaskId id : b.items) --n.machine_work[id].outstanding;
      ledger_record("release", n, total);
    }
    n.open_wtasks.clear();
    n.closed = true;
    n.finish = now();
    emit({{"kind", "node_end"},
          {"node", n.node->id},
          {"evaluated", n.evaluated},
          {"incomplete", n.n() - n.evaluated},
          {"lambda", n.ctl.lambda},
          {"incentive", n.ctl.incentive},
          {"spent", n.ledger.spent().micros}});
    start_ready_nodes();
  }

  // --- results ------------------------------------------------------------

  void record_result(NodeRun& n, MicrotaskId id, const ConsensusResult& r,
                     Route route) {
    const bool first = !n.results[id].has_value();
    n.results[id] = r;
    if (first) {
      advance_status(n.microtasks[id], MicrotaskStatus::kEvaluated);
      ++n.evaluated;
      ++n.completed_since_poll;
      ++(route == Route::kHuman ? n.by_human : n.by_machine);
    }
    if (!opt_.record_trace) return;
    json rec = mt(n, id);
    rec["kind"] = "consensus";
    rec["status"] = to_string(r.status);
    rec["decision"] = r.decision ? json(label(n, *r.decision)) : json(nullptr);
    rec["support"] = r.support;
    rec["truth"] = label(n, n.truth[id]);
    rec["correct"] = r.decision && *r.decision == n.truth[id];
    rec["route"] = to_string(route);
    rec["first"] = first;
    emit(std::move(rec));
  }

  void evaluate_human(NodeRun& n, MicrotaskId id) {
    const WTask& wt = n.wtasks.at(id);
    const auto votes = wt.returned_answers();
    // A w-task whose every assignment timed out has nothing to aggregate;
    // it stays unevaluated unless the controller reopens its slots.
    if (votes.empty()) return;
    record_result(
        n, id, aggregate({id, n.microtasks[id].category_count(), votes}, cfg_.voting),
        Route::kHuman);
  }

  // --- human work -----------------------------------------------------------

  bool wants_humans(const NodeRun& n, int c) const {
    if (!n.active() || !n.admits_class[c]) return false;
    if (n.human_unassigned.empty() && n.open_wtasks.empty()) return false;
    const Money o = offer(n);
    return o >= sc_.worker_classes[c].base_reward_accepted && can_afford(n, o);
  }

  bool try_dispatch(WorkerId w) {
    const int c = pool_.class_of(w);
    const std::string& name = pool_.name_of(w);
    for (int ni : topo_) {
      NodeRun& n = nodes_[ni];
      if (!wants_humans(n, c)) continue;
      WTask* wt = nullptr;
      for (MicrotaskId id : n.open_wtasks) {
        WTask& cand = n.wtasks.at(id);
        if (!cand.has_live_assignment(name)) {
          wt = &cand;
          break;
        }
      }
      const Money reward = offer(n);
      const SimTime window = std::min(now() + cfg_.assignment_timeout, n.deadline);
      if (!wt) {
        if (n.human_unassigned.empty()) continue;
        const MicrotaskId id = *n.human_unassigned.begin();
        n.human_unassigned.erase(n.human_unassigned.begin());
        wt = &n.wtasks
                  .emplace(id, spawn_wtask(n.microtasks[id], cfg_.replication_w,
                                           {window, n.deadline}, reward))
                  .first->second;
        n.open_wtasks.insert(id);
      }
      const MicrotaskId id = wt->microtask_id;
      renew_completion_deadline(*wt, window);
      issue_assignment(*wt, name, now(), reward);
      if (wt->open_slots() <= 0) n.open_wtasks.erase(id);
      commit(n, reward);

      const auto& wc = sc_.worker_classes[c];
      const Duration service = std::max(
          kOneTick,
          Duration::from_units(sample_service_time(wc.service_time, service_rng_[c])));
      pool_.start(w, {ni, id, now() + service});
      sim_.schedule(now() + service, AssignmentReturnPayload{ni, id, w});
      arm_timer(n, id);
      ++classes_[c].issued;
      if (opt_.record_trace) {
        json rec = mt(n, id);
        rec["kind"] = "assign";
        rec["worker"] = name;
        rec["class"] = wc.name;
        rec["reward"] = reward.micros;
        rec["due"] = wt->completion_deadline.ticks;
        emit(std::move(rec));
        ledger_record("commit", n, reward);
      }
      return true;
    }
    return false;
  }

  void cancel_timer(NodeRun& n, MicrotaskId id) {
    auto it = n.timers.find(id);
    if (it == n.timers.end()) return;
    sim_.cancel(it->second.event);
    n.timers.erase(it);
  }

  // Keeps one timeout event per w-task, one tick past its completion
  // deadline. Deadlines at the node deadline are left to the final poll.
  void arm_timer(NodeRun& n, MicrotaskId id) {
    const WTask& wt = n.wtasks.at(id);
    const SimTime at = wt.completion_deadline + kOneTick;
    auto it = n.timers.find(id);
    if (it != n.timers.end() && it->second.at == at) return;
    cancel_timer(n, id);
    if (wt.count(AssignmentOutcome::kPending) == 0 || at > n.deadline) return;
    n.timers[id] = {at, sim_.schedule(at, AssignmentTimeoutPayload{n.index, id})};
  }

  void settle_expired(NodeRun& n, const ExpiredAssignments& e,
                      const char* reason) {
    for (const auto& agent : e.agent_ids) {
      const int c = pool_.class_of(worker_ids_.at(agent));
      ++classes_[c].timed_out;
      if (opt_.record_trace) {
        json rec = mt(n, e.microtask_id);
        rec["kind"] = "timeout";
        rec["worker"] = agent;
        rec["class"] = sc_.worker_classes[c].name;
        rec["reason"] = reason;
        emit(std::move(rec));
      }
    }
    release(n, e.released);
    ledger_record("release", n, e.released);
  }

  void log_action(NodeRun& n, const Action& a, const std::string& detail,
                  int rerouted) {
    actions_.push_back({now(), n.node->id, action_name(a.kind), a.trigger, detail});
    emit({{"kind", "action"},
          {"node", n.node->id},
          {"action", action_name(a.kind)},
          {"trigger", a.trigger},
          {"detail", detail},
          {"rerouted", rerouted}});
  }

  // Reopens timed-out slots through the controller's planner.
  void after_timeout(NodeRun& n, MicrotaskId id) {
    WTask& wt = n.wtasks.at(id);
    if (cfg_.enabled && reassignable(wt) > 0) {
      ActionInputs in;
      in.config = cfg_;
      in.lambda = n.ctl.lambda;
      in.incentive = n.ctl.incentive;
      in.timed_out = {{id, reassignable(wt)}};
      for (const auto& a : corrective_action(in)) apply(n, a);
    }
    refresh_state(wt);
    if (wt.open_slots() > 0) n.open_wtasks.insert(id);
    if (wt.state == WTaskState::kDone) evaluate_human(n, id);
  }

  void handle(const WorkerArrivalPayload& p) {
    chains_[p.worker_class].event.reset();
    const WorkerId w = pool_.arrive(p.worker_class);
    worker_ids_[pool_.name_of(w)] = w;
    ++classes_[p.worker_class].arrivals;
    emit({{"kind", "arrival"},
          {"class", sc_.worker_classes[p.worker_class].name},
          {"worker", pool_.name_of(w)}});
    if (!try_dispatch(w)) pool_.depart(w);
  }

  void handle(const AssignmentReturnPayload& p) {
    const WorkerId w = p.worker;
    const int c = pool_.class_of(w);
    const std::string& name = pool_.name_of(w);
    pool_.finish(w);
    NodeRun& n = nodes_[p.node];
    if (!n.closed) {
      WTask& wt = n.wtasks.at(p.microtask);
      const AssignmentRecord* rec = nullptr;
      for (const auto& a : wt.assignments) {
        if (a.agent_id == name && a.outcome == AssignmentOutcome::kPending) rec = &a;
      }
      if (rec) {
        const Money reward = rec->reward;
        const SimTime issued = rec->issued_at;
        const Category truth = n.truth[p.microtask];
        const Category answer =
            answer_microtask(sc_.worker_classes[c].accuracy_p,
                             n.microtasks[p.microtask].category_count(), truth,
                             answers_rng_[c]);
        const auto outcome = record_return(wt, name, answer, now());
        if (outcome == AssignmentOutcome::kReturned) {
          charge(n, reward);
          auto& cs = classes_[c];
          ++cs.returned;
          if (answer == truth) ++cs.correct;
          cs.turnaround_ticks += (now() - issued).ticks;
          cs.spent += reward;
          if (opt_.record_trace) {
            json r = mt(n, p.microtask);
            r["kind"] = "return";
            r["worker"] = name;
            r["class"] = sc_.worker_classes[c].name;
            r["answer"] = label(n, answer);
            r["correct"] = answer == truth;
            r["reward"] = reward.micros;
            r["turnaround"] = (now() - issued).ticks;
            emit(std::move(r));
            ledger_record("charge", n, reward);
          }
          if (wt.count(AssignmentOutcome::kPending) == 0) {
            cancel_timer(n, p.microtask);
          }
          if (wt.state == WTaskState::kDone) evaluate_human(n, p.microtask);
        } else {
          settle_expired(n, {p.microtask, {name}, reward}, "late");
          after_timeout(n, p.microtask);
        }
      }
    }
    const bool stays =
        retention_rng_[c].uniform01() < sc_.worker_classes[c].retention;
    if (!(stays && try_dispatch(w))) pool_.depart(w);
  }

  void handle(const AssignmentTimeoutPayload& p) {
    NodeRun& n = nodes_[p.node];
    n.timers.erase(p.microtask);
    if (n.closed) return;
    WTask& wt = n.wtasks.at(p.microtask);
    const auto expired = expire_overdue({&wt}, now());
    if (expired.empty()) {
      arm_timer(n, p.microtask);
      return;
    }
    for (const auto& e : expired) settle_expired(n, e, "deadline");
    after_timeout(n, p.microtask);
  }

  // --- machine work -------------------------------------------------------

  void dispatch_machines() {
    const int replicas = cfg_.machine_replication;
    for (int ni : topo_) {
      NodeRun& n = nodes_[ni];
      if (!n.active() || n.machine_waiting.empty()) continue;
      for (int m : n.machines) {
        if (machine_busy_[m] || n.machine_waiting.empty()) continue;
        const auto& prof = sc_.machine_agents[m];
        Batch b{m, ni, {}, prof.cost_per_item, false};
        for (auto it = n.machine_waiting.begin();
             it != n.machine_waiting.end() &&
             static_cast<int>(b.items.size()) < prof.capacity;) {
          MachineWork& mw = n.machine_work[*it];
          if (std::find(mw.agents.begin(), mw.agents.end(), m) != mw.agents.end()) {
            ++it;
            continue;
          }
          if (!can_afford(n, prof.cost_per_item)) break;
          commit(n, prof.cost_per_item);
          mw.agents.push_back(m);
          ++mw.outstanding;
          advance_status(n.microtasks[*it], MicrotaskStatus::kInFlight);
          b.items.push_back(*it);
          if (static_cast<int>(mw.agents.size()) >= replicas) {
            it = n.machine_waiting.erase(it);
          } else {
            ++it;
          }
        }
        if (b.items.empty()) continue;
        machine_busy_[m] = 1;
        const Duration service = std::max(kOneTick, prof.service_time_per_item);
        sim_.schedule(now() + service,
                      MachineBatchDonePayload{static_cast<int>(batches_.size())});
        const Money total = static_cast<std::int64_t>(b.items.size()) * b.cost_each;
        emit({{"kind", "machine_assign"},
              {"node", n.node->id},
              {"agent", prof.name},
              {"items", b.items},
              {"cost", b.cost_each.micros}});
        ledger_record("commit", n, total);
        batches_.push_back(std::move(b));
      }
    }
  }

  void handle(const MachineBatchDonePayload& p) {
    Batch& b = batches_[p.batch];
    machine_busy_[b.agent] = 0;
    if (b.settled) return;
    b.settled = true;
    NodeRun& n = nodes_[b.node];
    const auto& prof = sc_.machine_agents[b.agent];
    auto& ms = machines_[b.agent];
    ++ms.batches;
    json answers = json::array();
    int correct = 0;
    for (MicrotaskId id : b.items) {
      const Category a = answer_microtask(prof.accuracy_p,
                                          n.microtasks[id].category_count(),
                                          n.truth[id], machine_rng_[b.agent]);
      MachineWork& mw = n.machine_work[id];
      mw.answers.push_back(a);
      --mw.outstanding;
      if (a == n.truth[id]) ++correct;
      charge(n, b.cost_each);
      answers.push_back(label(n, a));
    }
    const Money total = static_cast<std::int64_t>(b.items.size()) * b.cost_each;
    ms.items += static_cast<int>(b.items.size());
    ms.correct += correct;
    ms.spent += total;
    emit({{"kind", "machine_done"},
          {"node", n.node->id},
          {"agent", prof.name},
          {"items", b.items},
          {"answers", std::move(answers)},
          {"correct", correct},
          {"cost", b.cost_each.micros}});
    ledger_record("charge", n, total);
    for (MicrotaskId id : b.items) {
      const MachineWork& mw = n.machine_work[id];
      if (mw.outstanding == 0 &&
          static_cast<int>(mw.answers.size()) >= cfg_.machine_replication) {
        record_result(n, id,
                      aggregate({id, n.microtasks[id].category_count(), mw.answers},
                                cfg_.voting),
                      Route::kMachine);
      }
    }
  }

  // --- controller -----------------------------------------------------------

  // Moves up to `count` of the highest-id unpicked human microtasks to the
  // machine queue.
  int reroute(NodeRun& n, int count) {
    int moved = 0;
    while (moved < count && !n.human_unassigned.empty()) {
      const MicrotaskId id = *n.human_unassigned.rbegin();
      n.human_unassigned.erase(id);
      n.microtasks[id].route = Route::kMachine;
      n.machine_waiting.insert(id);
      ++moved;
    }
    return moved;
  }

  void apply(NodeRun& n, const Action& a) {
    std::string detail;
    int moved = 0;
    if (const auto* r = std::get_if<ReassignAction>(&a.kind)) {
      WTask& wt = n.wtasks.at(r->microtask);
      reassign(wt, r->slots);
      if (wt.open_slots() > 0) n.open_wtasks.insert(r->microtask);
      detail = "microtask=" + std::to_string(r->microtask) +
               " slots=" + std::to_string(r->slots);
    } else if (const auto* r = std::get_if<RaiseIncentiveAction>(&a.kind)) {
      n.ctl.incentive = r->to;
      detail = "from=" + json(r->from).dump() + " to=" + json(r->to).dump();
    } else if (const auto* r = std::get_if<ReduceLambdaAction>(&a.kind)) {
      n.ctl.lambda = r->to;
      moved = reroute(n, r->reroute);
      n.rerouted += moved;
      detail = "from=" + json(r->from).dump() + " to=" + json(r->to).dump() +
               " rerouted=" + std::to_string(moved);
    } else if (const auto* r = std::get_if<EscalateAction>(&a.kind)) {
      WTask& wt = n.wtasks.at(r->microtask);
      escalate(wt);
      n.open_wtasks.insert(r->microtask);
      detail = "microtask=" + std::to_string(r->microtask);
    }
    log_action(n, a, detail, moved);
  }

  void handle(const PollTickPayload& p) {
    NodeRun& n = nodes_[p.node];
    const int k = p.poll_index;
    const SimTime prev = k == 0 ? n.start : n.polls[k - 1];
    const Duration interval = n.polls[k] - prev;
    if (interval.ticks > 0) {
      update_rho(n.ctl, n.completed_since_poll, interval.units(), cfg_.ewma_alpha);
      n.completed_since_poll = 0;
    }
    n.ctl.poll_index = k;
    n.ctl.n_human = n.ctl.n_machine = 0;
    int consensus = 0;
    for (const auto& m : n.microtasks) {
      if (m.status == MicrotaskStatus::kEvaluated) continue;
      ++(m.route == Route::kHuman ? n.ctl.n_human : n.ctl.n_machine);
    }
    for (const auto& r : n.results) {
      if (r && r->status == ConsensusStatus::kConsensus) ++consensus;
    }
    RiskInputs ri;
    ri.rho = n.ctl.rho;
    ri.now = now();
    ri.deadline = n.deadline;
    ri.n_total = n.n();
    ri.n_evaluated = n.evaluated;
    ri.consensus_rate = n.evaluated ? double(consensus) / n.evaluated : 0.0;
    ri.accuracy_target = n.slo.accuracy_target;
    ri.headroom = headroom(n);
    ri.one_reward = offer(n);
    n.ctl.risks = assess_risk(ri);
    if (opt_.record_trace) {
      json risks = json::array();
      for (const auto& r : n.ctl.risks.names()) risks.push_back(r);
      emit({{"kind", "poll"},
            {"node", n.node->id},
            {"index", k},
            {"lambda", n.ctl.lambda},
            {"rho", n.ctl.rho},
            {"evaluated", n.evaluated},
            {"total", n.n()},
            {"consensus_rate", ri.consensus_rate},
            {"risks", std::move(risks)},
            {"incentive", n.ctl.incentive},
            {"headroom", ri.headroom.micros},
            {"n_human", n.ctl.n_human},
            {"n_machine", n.ctl.n_machine},
            {"closed", n.closed}});
    }
    if (cfg_.enabled && n.active() && k + 1 < cfg_.K) control(n, ri);
    if (k + 1 == cfg_.K && !n.closed) close_node(n);
  }

  void control(NodeRun& n, const RiskInputs& ri) {
    ActionInputs in;
    in.risks = n.ctl.risks;
    in.projection = ri;
    in.lambda = n.ctl.lambda;
    in.incentive = n.ctl.incentive;
    in.config = cfg_;
    in.headroom = ri.headroom;
    in.base_reward = cfg_.reward_per_assignment;
    int open = 0;
    for (MicrotaskId id : n.open_wtasks) open += n.wtasks.at(id).open_slots();
    in.unpicked_human = static_cast<int>(n.human_unassigned.size());
    in.remaining_human_slots = in.unpicked_human * cfg_.replication_w + open;
    Money machine_cost;
    for (int m : n.machines) {
      machine_cost = std::max(machine_cost, sc_.machine_agents[m].cost_per_item);
    }
    int machine_slots = 0;
    for (MicrotaskId id : n.machine_waiting) {
      const auto it = n.machine_work.find(id);
      const int held = it == n.machine_work.end()
                           ? 0
                           : static_cast<int>(it->second.agents.size());
      if (held == 0) ++in.unstarted_machine;
      machine_slots += cfg_.machine_replication - held;
    }
    in.reserved = static_cast<std::int64_t>(in.remaining_human_slots) * ri.one_reward +
                  static_cast<std::int64_t>(machine_slots) * machine_cost;
    in.can_reroute = n.node->agent_tag == AgentTag::kEither && !n.machines.empty();
    for (const auto& [id, wt] : n.wtasks) {
      if (reassignable(wt) > 0) in.timed_out.emplace_back(id, reassignable(wt));
      const auto& r = n.results[id];
      if (r && r->status == ConsensusStatus::kNoConsensus &&
          wt.state == WTaskState::kDone &&
          wt.extras < cfg_.max_extra_per_microtask) {
        in.no_consensus.push_back(id);
      }
    }
    for (const auto& a : corrective_action(in)) apply(n, a);
  }

  // --- script ---------------------------------------------------------------

  void repartition(NodeRun& n) {
    std::set<MicrotaskId> free = n.human_unassigned;
    for (MicrotaskId id : n.machine_waiting) {
      if (!n.machine_work.count(id)) free.insert(id);
    }
    const int keep = partition(static_cast<int>(free.size()), n.ctl.lambda).first;
    int i = 0;
    for (MicrotaskId id : free) {
      const bool human = i++ < keep;
      n.microtasks[id].route = human ? Route::kHuman : Route::kMachine;
      if (human) {
        n.machine_waiting.erase(id);
        n.human_unassigned.insert(id);
      } else {
        n.human_unassigned.erase(id);
        n.machine_waiting.insert(id);
      }
    }
  }

  void handle(const ScenarioScriptPayload& p) {
    const ScriptEntry& e = sc_.script[p.script_index];
    json rec = {{"kind", "script"},
                {"index", p.script_index},
                {"action", to_string(e.op)},
                {"value", e.value}};
    switch (e.op) {
      case ScriptEntry::Op::kSetArrivalRate:
        for (std::size_t c = 0; c < sc_.worker_classes.size(); ++c) {
          if (sc_.worker_classes[c].name == e.target) {
            pool_.set_base_rate(static_cast<int>(c), e.value);
          }
        }
        rec["class"] = e.target;
        break;
      case ScriptEntry::Op::kSetLambda:
        for (auto& n : nodes_) {
          if (n.active() && n.node->agent_tag == AgentTag::kEither &&
              !n.classes.empty() && !n.machines.empty()) {
            n.ctl.lambda = e.value;
            repartition(n);
          }
        }
        break;
      case ScriptEntry::Op::kSetIncentive:
        incentive_floor_ = e.value;
        for (auto& n : nodes_) {
          if (n.active()) n.ctl.incentive = e.value;
        }
        break;
    }
    emit(std::move(rec));
  }

  // --- bookkeeping after each event -----------------------------------------

  void refresh_arrivals() {
    double incentive = 1.0;
    for (const auto& n : nodes_) {
      if (n.active() && !n.classes.empty()) {
        incentive = std::max(incentive, n.ctl.incentive);
      }
    }
    if (incentive != pool_.incentive()) pool_.set_incentive(incentive);
    for (std::size_t c = 0; c < chains_.size(); ++c) {
      const double rate = pool_.effective_arrival_rate(static_cast<int>(c));
      bool want = rate > 0.0;
      if (want) {
        want = std::any_of(nodes_.begin(), nodes_.end(), [&](const NodeRun& n) {
          return wants_humans(n, static_cast<int>(c));
        });
      }
      ArrivalChain& ch = chains_[c];
      if (ch.event && (!want || ch.rate != rate)) {
        sim_.cancel(*ch.event);
        ch.event.reset();
      }
      if (want && !ch.event) {
        const Duration gap =
            Duration::from_units(sample_interarrival(rate, arrivals_rng_[c]));
        ch.event = sim_.schedule(now() + gap,
                                 WorkerArrivalPayload{static_cast<int>(c)});
        ch.rate = rate;
      }
    }
  }

  void after_event() {
    for (int ni : topo_) {
      NodeRun& n = nodes_[ni];
      if (n.active() && node_complete(n)) close_node(n);
    }
    dispatch_machines();
    refresh_arrivals();
    if (opt_.observer) {
      std::vector<LedgerView> views;
      views.push_back({"task", task_ledger_.spent(), task_ledger_.committed(),
                       task_ledger_.budget()});
      for (const auto& n : nodes_) {
        if (!n.started) continue;
        views.push_back({n.node->id, n.ledger.spent(), n.ledger.committed(),
                         n.ledger.budget()});
      }
      opt_.observer(now(), views);
    }
  }

  Summary build_summary() const {
    Summary s;
    s.scenario = sc_.name;
    s.seed = sc_.seed;
    s.budget = sc_.graph.task_slo.budget;
    s.deadline = sc_.graph.task_slo.deadline;
    s.accuracy_target = sc_.graph.task_slo.accuracy_target;
    s.events = sim_.counts();
    for (const auto& n : nodes_) {
      NodeSummary ns;
      ns.id = n.node->id;
      ns.n = n.n();
      ns.evaluated = n.evaluated;
      ns.evaluated_by_human = n.by_human;
      ns.evaluated_by_machine = n.by_machine;
      for (std::size_t i = 0; i < n.results.size(); ++i) {
        const auto& r = n.results[i];
        if (!r) continue;
        if (r->status == ConsensusStatus::kConsensus) ++ns.consensus;
        if (r->decision && *r->decision == n.truth[i]) ++ns.correct;
      }
      ns.rerouted = n.rerouted;
      ns.spent = n.ledger.spent();
      ns.budget = n.slo.budget;
      ns.start = n.start;
      ns.finish = n.finish;
      ns.deadline = n.deadline;
      ns.accuracy_target = n.slo.accuracy_target;
      ns.final_lambda = n.ctl.lambda;
      ns.final_incentive = n.ctl.incentive;
      s.nodes.push_back(std::move(ns));
    }
    s.classes = classes_;
    s.machines = machines_;
    s.actions = actions_;
    finalize(s);
    return s;
  }

  const Scenario& sc_;
  const ControllerConfig& cfg_;
  const RunOptions& opt_;
  Simulator sim_;
  BudgetLedger task_ledger_;
  AgentPoolState pool_;
  std::vector<NodeRun> nodes_;
  std::map<std::string, int> index_of_;
  std::vector<int> topo_;
  std::vector<RngStream> arrivals_rng_, service_rng_, answers_rng_,
      retention_rng_, machine_rng_;
  std::vector<ArrivalChain> chains_;
  std::vector<char> machine_busy_;
  std::vector<Batch> batches_;
  std::unordered_map<std::string, WorkerId> worker_ids_;
  double incentive_floor_ = 1.0;
  Trace trace_;
  std::vector<ClassSummary> classes_;
  std::vector<MachineSummary> machines_;
  std::vector<ActionEntry> actions_;
};

}  // namespace

RunResult run_scenario(const Scenario& scenario, const RunOptions& options) {
  Engine engine(scenario, options);
  return engine.run();
}

}  // namespace hmflow

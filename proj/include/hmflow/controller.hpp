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

// SLO feedback controller.
//
// The controller splits a node's microtasks between humans and machines with
// the HM-ratio lambda (humans get lambda times as many as machines), probes
// the completion rate rho at K equally spaced polling instants ending at the
// deadline, projects whether the deadline will be met, and plans corrective
// actions that never exceed the budget ledger's headroom.
//
// Everything here is pure; the engine applies the planned actions.

#ifndef HMFLOW_CONTROLLER_HPP_
#define HMFLOW_CONTROLLER_HPP_

#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "hmflow/aggregation.hpp"
#include "hmflow/slo.hpp"
#include "hmflow/task.hpp"
#include "hmflow/types.hpp"

namespace hmflow {

struct ControllerConfig {
  bool enabled = true;
  int K = 10;
  double initial_lambda = 1.0;
  int replication_w = 3;
  int machine_replication = 1;
  Money reward_per_assignment = Money::from_currency(0.02);
  double ewma_alpha = 0.5;
  double incentive_step = 1.25;  // gamma
  double lambda_decay = 0.5;
  double elasticity = 1.0;
  Duration assignment_timeout = Duration::from_units(60.0);
  int max_extra_per_microtask = 2;
  VotingRule voting = VotingRule::kMajority;

  bool operator==(const ControllerConfig&) const = default;
};

// Throws Error(kInvalidArgument) naming the offending field.
void check_controller_config(const ControllerConfig& c);

struct RiskFlags {
  bool time_risk = false;
  bool accuracy_risk = false;
  bool budget_exhausted = false;

  bool any() const { return time_risk || accuracy_risk || budget_exhausted; }
  std::vector<std::string> names() const;
  bool operator==(const RiskFlags&) const = default;
};

struct ControllerState {
  double lambda = 1.0;
  double rho = 0.0;
  bool rho_initialized = false;
  int poll_index = 0;
  int n_human = 0;    // human-routed, not yet evaluated
  int n_machine = 0;  // machine-routed, not yet evaluated
  double incentive = 1.0;
  RiskFlags risks;
};

// (n_H, n_M) with n_H = round_half_up(lambda * n / (1 + lambda)). Throws
// Error(kInvalidArgument) for negative lambda or n.
std::pair<int, int> partition(int n, double lambda);

// EWMA of completed / interval_length; the first probe initializes rho.
// Throws Error(kInvalidArgument) for a non-positive interval.
double update_rho(ControllerState& state, int completed_in_interval,
                  double interval_length, double alpha);

// K instants start + (k+1) * (end - start) / K, the last one exactly `end`.
std::vector<SimTime> polling_instants(SimTime start, SimTime end, int K);

struct RiskInputs {
  double rho = 0.0;
  SimTime now;
  SimTime deadline;
  int n_total = 0;
  int n_evaluated = 0;
  double consensus_rate = 0.0;  // over evaluated microtasks
  double accuracy_target = 1.0;
  Money headroom;
  Money one_reward;
};

// TimeRisk: n_evaluated + rho * (deadline - now) < n_total.
// AccuracyRisk: consensus below target once n_evaluated >= max(10, 5% n).
// BudgetExhausted: headroom below one assignment's reward.
RiskFlags assess_risk(const RiskInputs& in);

struct ReassignAction {
  MicrotaskId microtask = 0;
  int slots = 0;
};
struct RaiseIncentiveAction {
  double from = 1.0;
  double to = 1.0;
};
struct ReduceLambdaAction {
  double from = 0.0;
  double to = 0.0;
  int reroute = 0;  // unpicked human microtasks to move to machines
};
struct EscalateAction {
  MicrotaskId microtask = 0;
};

using ActionKind = std::variant<ReassignAction, RaiseIncentiveAction,
                                ReduceLambdaAction, EscalateAction>;

struct Action {
  ActionKind kind;
  std::string trigger;  // "timeout", "time_risk" or "accuracy_risk"
};

const char* action_name(const ActionKind& a);

struct ActionInputs {
  RiskFlags risks;
  RiskInputs projection;
  double lambda = 0.0;
  double incentive = 1.0;
  ControllerConfig config;
  Money headroom;
  // Part of the headroom already spoken for by work not yet issued;
  // escalations may only spend the rest.
  Money reserved;
  Money base_reward;
  // Human slots not issued yet (unpicked microtasks * w plus open slots).
  int remaining_human_slots = 0;
  // Human-routed microtasks nobody has picked, and machine-routed ones not
  // started; both are still free to move.
  int unpicked_human = 0;
  int unstarted_machine = 0;
  bool can_reroute = false;  // Either-tagged node with a machine agent
  // (microtask, reopenable slots) in ascending microtask order.
  std::vector<std::pair<MicrotaskId, int>> timed_out;
  // NoConsensus microtasks still allowed an extra vote, ascending.
  std::vector<MicrotaskId> no_consensus;
};

// Offered reward under an incentive multiplier, rounded down to a micro.
Money offered_reward(Money base, double incentive);

// Escalation ladder, in order:
//  1. reopen every timed-out slot;
//  2. on TimeRisk, raise the incentive by gamma, capped so the remaining human
//     slots stay affordable at the new price;
//  3. if the projection (rho scaled by the supply gain) still misses the
//     deadline, multiply lambda by lambda_decay and move unpicked human
//     microtasks to machines;
//  4. on AccuracyRisk, add one vote to NoConsensus microtasks, lowest id
//     first, while the unreserved headroom covers the reward.
std::vector<Action> corrective_action(const ActionInputs& in);

}  // namespace hmflow

#endif  // HMFLOW_CONTROLLER_HPP_

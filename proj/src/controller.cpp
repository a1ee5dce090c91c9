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

#include "hmflow/controller.hpp"

#include <algorithm>
#include <cmath>

#include "hmflow/agents.hpp"

namespace hmflow {

void check_controller_config(const ControllerConfig& c) {
  auto bad = [](const char* what) { fail(ErrorCode::kInvalidArgument, what); };
  if (c.K < 1) bad("controller.K must be >= 1");
  if (!(c.initial_lambda >= 0.0) || !std::isfinite(c.initial_lambda)) {
    bad("controller.initial_lambda must be a finite value >= 0");
  }
  if (c.replication_w < 1 || c.replication_w % 2 == 0) {
    bad("controller.replication_w must be an odd positive integer");
  }
  if (c.machine_replication < 1) {
    bad("controller.machine_replication must be >= 1");
  }
  if (c.reward_per_assignment.micros < 0) {
    bad("controller.reward must be >= 0");
  }
  if (!(c.ewma_alpha > 0.0 && c.ewma_alpha <= 1.0)) {
    bad("controller.ewma_alpha must lie in (0, 1]");
  }
  if (!(c.incentive_step >= 1.0)) bad("controller.incentive_step must be >= 1");
  if (!(c.lambda_decay > 0.0 && c.lambda_decay < 1.0)) {
    bad("controller.lambda_decay must lie in (0, 1)");
  }
  if (!(c.elasticity >= 0.0)) bad("controller.elasticity must be >= 0");
  if (c.assignment_timeout.ticks <= 0) {
    bad("controller.assignment_timeout must be > 0");
  }
  if (c.max_extra_per_microtask < 0) {
    bad("controller.max_extra_per_microtask must be >= 0");
  }
}

std::vector<std::string> RiskFlags::names() const {
  std::vector<std::string> out;
  if (time_risk) out.emplace_back("time_risk");
  if (accuracy_risk) out.emplace_back("accuracy_risk");
  if (budget_exhausted) out.emplace_back("budget_exhausted");
  return out;
}

std::pair<int, int> partition(int n, double lambda) {
  if (n < 0) fail(ErrorCode::kInvalidArgument, "n must be >= 0");
  if (!(lambda >= 0.0)) fail(ErrorCode::kInvalidArgument, "lambda must be >= 0");
  const double share = lambda * static_cast<double>(n) / (1.0 + lambda);
  const auto human = static_cast<int>(
      std::clamp<std::int64_t>(round_half_up(share), 0, n));
  return {human, n - human};
}

double update_rho(ControllerState& state, int completed_in_interval,
                  double interval_length, double alpha) {
  if (!(interval_length > 0.0)) {
    fail(ErrorCode::kInvalidArgument, "polling interval must be > 0");
  }
  const double instant = completed_in_interval / interval_length;
  if (!state.rho_initialized) {
    state.rho = instant;
    state.rho_initialized = true;
  } else {
    state.rho = alpha * instant + (1.0 - alpha) * state.rho;
  }
  return state.rho;
}

std::vector<SimTime> polling_instants(SimTime start, SimTime end, int K) {
  if (K < 1) fail(ErrorCode::kInvalidArgument, "K must be >= 1");
  if (end < start) fail(ErrorCode::kInvalidArgument, "end precedes start");
  std::vector<SimTime> out;
  const auto span = static_cast<__int128>(end.ticks - start.ticks);
  for (int k = 0; k < K; ++k) {
    out.push_back(SimTime{start.ticks +
                          static_cast<std::int64_t>(span * (k + 1) / K)});
  }
  return out;
}

namespace {

bool projects_short(double rho, const RiskInputs& in) {
  const double left = (in.deadline - in.now).units();
  return in.n_evaluated + rho * std::max(left, 0.0) <
         static_cast<double>(in.n_total);
}

}  // namespace

RiskFlags assess_risk(const RiskInputs& in) {
  RiskFlags f;
  f.time_risk = in.n_evaluated < in.n_total && projects_short(in.rho, in);
  const bool warmed_up = in.n_evaluated >= 10 &&
                         in.n_evaluated >= 0.05 * static_cast<double>(in.n_total);
  f.accuracy_risk = warmed_up && in.consensus_rate < in.accuracy_target;
  f.budget_exhausted = in.headroom < in.one_reward;
  return f;
}

const char* action_name(const ActionKind& a) {
  switch (a.index()) {
    case 0:
      return "reassign";
    case 1:
      return "raise_incentive";
    case 2:
      return "reduce_lambda";
    case 3:
      return "escalate";
  }
  return "unknown";
}

Money offered_reward(Money base, double incentive) {
  return Money{static_cast<std::int64_t>(
      std::floor(static_cast<double>(base.micros) * incentive))};
}

std::vector<Action> corrective_action(const ActionInputs& in) {
  std::vector<Action> out;
  const ControllerConfig& cfg = in.config;

  for (const auto& [id, slots] : in.timed_out) {
    if (slots > 0) out.push_back({ReassignAction{id, slots}, "timeout"});
  }

  double incentive = in.incentive;
  if (in.risks.time_risk) {
    bool persists = true;
    double raised = incentive * cfg.incentive_step;
    if (in.remaining_human_slots > 0 && in.base_reward.micros > 0) {
      // Every remaining slot must stay affordable at the raised price.
      const double per_slot_cap =
          static_cast<double>(in.headroom.micros) /
          (static_cast<double>(in.remaining_human_slots) *
           static_cast<double>(in.base_reward.micros));
      raised = std::min(raised, per_slot_cap);
    }
    if (in.remaining_human_slots > 0 && raised > incentive * (1.0 + 1e-9)) {
      out.push_back({RaiseIncentiveAction{incentive, raised}, "time_risk"});
      const double gain = apply_incentive(1.0, raised, cfg.elasticity) /
                          apply_incentive(1.0, incentive, cfg.elasticity);
      incentive = raised;
      persists = projects_short(in.projection.rho * gain, in.projection);
    }
    if (persists && in.can_reroute && in.lambda > 0.0) {
      const double lambda = in.lambda * cfg.lambda_decay;
      const int free = in.unpicked_human + in.unstarted_machine;
      const int keep_human = partition(free, lambda).first;
      const int reroute = std::max(0, in.unpicked_human - keep_human);
      out.push_back({ReduceLambdaAction{in.lambda, lambda, reroute},
                     "time_risk"});
    }
  }

  if (in.risks.accuracy_risk && !in.no_consensus.empty()) {
    const Money reward = offered_reward(in.base_reward, incentive);
    std::size_t allowed = in.no_consensus.size();
    if (reward.micros > 0) {
      const auto spare = in.headroom.micros - in.reserved.micros;
      const auto affordable = spare > 0 ? spare / reward.micros : 0;
      allowed = std::min<std::size_t>(allowed,
                                      static_cast<std::size_t>(affordable));
    }
    for (std::size_t i = 0; i < allowed; ++i) {
      out.push_back({EscalateAction{in.no_consensus[i]}, "accuracy_risk"});
    }
  }
  return out;
}

}  // namespace hmflow

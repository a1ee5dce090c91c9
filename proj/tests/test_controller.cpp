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


#include <variant>

#include "doctest.h"
#include "hmflow/controller.hpp"
#include "hmflow/sim.hpp"

using namespace hmflow;

namespace {

SimTime at(double u) { return SimTime::from_units(u); }
const Money kReward = Money::from_currency(0.02);

RiskInputs projection(double rho, double now, int evaluated, int total) {
  RiskInputs in;
  in.rho = rho;
  in.now = at(now);
  in.deadline = at(1000);
  in.n_evaluated = evaluated;
  in.n_total = total;
  in.consensus_rate = 1.0;
  in.accuracy_target = 0.8;
  in.headroom = Money::from_currency(10);
  in.one_reward = kReward;
  return in;
}

ActionInputs time_risk_inputs(Money headroom) {
  ActionInputs in;
  in.projection = projection(0.1, 400, 100, 500);
  in.risks = assess_risk(in.projection);
  in.lambda = 4.0;
  in.headroom = headroom;
  in.base_reward = kReward;
  in.remaining_human_slots = 600;
  in.unpicked_human = 200;
  in.unstarted_machine = 50;
  in.can_reroute = true;
  return in;
}

template <typename T>
int count(const std::vector<Action>& acts) {
  int n = 0;
  for (const auto& a : acts) n += std::holds_alternative<T>(a.kind);
  return n;
}

}  // namespace

TEST_CASE("partition examples") {
  CHECK(partition(300, 2.0) == std::pair{200, 100});
  CHECK(partition(10, 0.0) == std::pair{0, 10});
  CHECK(partition(7, 1.0) == std::pair{4, 3});
  CHECK(partition(100, 1e6) == std::pair{100, 0});
  CHECK(partition(0, 3.0) == std::pair{0, 0});
  CHECK_THROWS_AS(partition(10, -0.5), Error);
  CHECK_THROWS_AS(partition(-1, 1.0), Error);
}

TEST_CASE("property: partition identity over random inputs") {
  auto rng = seeded_rng(21, "test/partition");
  for (int i = 0; i < 10000; ++i) {
    const int n = static_cast<int>(rng.uniform_below(5001));
    const double lambda = rng.uniform01() < 0.1 ? 0.0 : std::exp(rng.uniform01() * 20 - 10);
    const auto [h, m] = partition(n, lambda);
    REQUIRE(h + m == n);
    REQUIRE(h >= 0);
    REQUIRE(m >= 0);
    if (lambda == 0.0) REQUIRE(h == 0);
    // Monotone in lambda.
    REQUIRE(partition(n, lambda * 2).first >= h);
  }
}

TEST_CASE("update_rho examples") {
  ControllerState s;
  CHECK(update_rho(s, 50, 100.0, 0.5) == doctest::Approx(0.5));
  CHECK(update_rho(s, 30, 100.0, 0.5) == doctest::Approx(0.4));
  double prev = s.rho;
  for (int i = 0; i < 5; ++i) {
    const double r = update_rho(s, 0, 100.0, 0.5);
    CHECK(r < prev);
    prev = r;
  }
  CHECK_THROWS_AS(update_rho(s, 1, 0.0, 0.5), Error);
}

TEST_CASE("polling instants are equally spaced and end at the deadline") {
  for (int K : {1, 5, 20, 7}) {
    const auto t = polling_instants(at(0), at(1000), K);
    REQUIRE(t.size() == static_cast<std::size_t>(K));
    CHECK(t.back() == at(1000));
    for (int k = 0; k < K; ++k) {
      CHECK(std::abs(t[k].units() - 1000.0 * (k + 1) / K) < 1e-6);
    }
  }
  const auto shifted = polling_instants(at(200), at(300), 4);
  CHECK(shifted.front() == at(225));
  CHECK(shifted.back() == at(300));
  CHECK_THROWS_AS(polling_instants(at(0), at(10), 0), Error);
}

TEST_CASE("assess_risk examples") {
  CHECK(assess_risk(projection(0.5, 400, 100, 500)).time_risk);
  CHECK_FALSE(assess_risk(projection(1.0, 400, 100, 500)).time_risk);
  CHECK_FALSE(assess_risk(projection(0.0, 400, 500, 500)).time_risk);
}

TEST_CASE("assess_risk: accuracy warm-up and budget") {
  auto in = projection(10, 0, 9, 100);
  in.consensus_rate = 0.1;
  CHECK_FALSE(assess_risk(in).accuracy_risk);  // fewer than 10 evaluated
  in.n_evaluated = 10;
  CHECK(assess_risk(in).accuracy_risk);
  in.n_total = 1000;  // 10 < 5% of 1000
  CHECK_FALSE(assess_risk(in).accuracy_risk);
  in.headroom = Money::from_currency(0.019999);
  CHECK(assess_risk(in).budget_exhausted);
  in.headroom = kReward;
  CHECK_FALSE(assess_risk(in).budget_exhausted);
  CHECK(RiskFlags{true, false, true}.names() ==
        std::vector<std::string>{"time_risk", "budget_exhausted"});
}

TEST_CASE("corrective_action: no risks, no actions") {
  ActionInputs in;
  in.headroom = Money::from_currency(10);
  in.base_reward = kReward;
  CHECK(corrective_action(in).empty());
}

TEST_CASE("corrective_action: TimeRisk with zero headroom") {
  auto in = time_risk_inputs(Money{});
  in.timed_out = {{3, 1}, {8, 2}};
  const auto acts = corrective_action(in);
  CHECK(count<RaiseIncentiveAction>(acts) == 0);
  CHECK(count<ReassignAction>(acts) == 2);
  REQUIRE(count<ReduceLambdaAction>(acts) == 1);
  CHECK(acts[0].trigger == "timeout");
  const auto& r = std::get<ReduceLambdaAction>(acts.back().kind);
  CHECK(r.from == 4.0);
  CHECK(r.to == 2.0);
  // 250 free microtasks at lambda 2 keeps 167 human: 33 move to machines.
  CHECK(r.reroute == 33);
}

TEST_CASE("corrective_action: incentive raise is capped by headroom") {
  // 600 slots at 0.02 with 13.2 of headroom allows at most 1.1x.
  auto in = time_risk_inputs(Money::from_currency(13.2));
  const auto acts = corrective_action(in);
  REQUIRE(count<RaiseIncentiveAction>(acts) == 1);
  const auto& r = std::get<RaiseIncentiveAction>(acts[0].kind);
  CHECK(r.to == doctest::Approx(1.1));
  // Supply gain of 1.1 does not rescue rho = 0.1, so lambda drops too.
  CHECK(count<ReduceLambdaAction>(acts) == 1);

  in.headroom = Money::from_currency(100);
  in.projection.rho = 0.6;  // 100 + 0.75 * 600 = 550 >= 500 after the raise
  const auto fixed = corrective_action(in);
  CHECK(count<RaiseIncentiveAction>(fixed) == 1);
  CHECK(std::get<RaiseIncentiveAction>(fixed[0].kind).to == doctest::Approx(1.25));
  CHECK(count<ReduceLambdaAction>(fixed) == 0);
}

TEST_CASE("corrective_action: human-only nodes cannot reroute") {
  auto in = time_risk_inputs(Money{});
  in.can_reroute = false;
  CHECK(corrective_action(in).empty());
}

TEST_CASE("corrective_action: escalations limited by headroom, lowest ids first") {
  ActionInputs in;
  in.risks.accuracy_risk = true;
  in.headroom = 2 * kReward;
  in.base_reward = kReward;
  in.no_consensus = {4, 9, 11};
  const auto acts = corrective_action(in);
  REQUIRE(acts.size() == 2);
  CHECK(std::get<EscalateAction>(acts[0].kind).microtask == 4);
  CHECK(std::get<EscalateAction>(acts[1].kind).microtask == 9);
  CHECK(acts[0].trigger == "accuracy_risk");

  in.reserved = kReward;  // one reward already spoken for
  CHECK(corrective_action(in).size() == 1);
}

TEST_CASE("offered reward rounds down to a micro") {
  CHECK(offered_reward(kReward, 1.25) == Money::from_currency(0.025));
  CHECK(offered_reward(Money{3}, 1.5) == Money{4});
  CHECK(std::string(action_name(ActionKind{ReduceLambdaAction{}})) == "reduce_lambda");
}

TEST_CASE("property: lambda never increases under sustained TimeRisk with no headroom") {
  auto rng = seeded_rng(31, "test/lambda");
  for (int trial = 0; trial < 500; ++trial) {
    auto in = time_risk_inputs(Money{});
    in.lambda = 0.1 + rng.uniform01() * 10;
    in.unpicked_human = static_cast<int>(rng.uniform_below(300));
    in.unstarted_machine = static_cast<int>(rng.uniform_below(300));
    for (int poll = 0; poll < 10; ++poll) {
      const auto acts = corrective_action(in);
      for (const auto& a : acts) {
        CHECK_FALSE(std::holds_alternative<RaiseIncentiveAction>(a.kind));
        if (const auto* r = std::get_if<ReduceLambdaAction>(&a.kind)) {
          CHECK(r->to <= r->from);
          CHECK(r->reroute <= in.unpicked_human);
          in.lambda = r->to;
          in.unpicked_human -= r->reroute;
          in.unstarted_machine += r->reroute;
        }
      }
    }
  }
}

TEST_CASE("controller config checks") {
  ControllerConfig c;
  check_controller_config(c);
  c.replication_w = 4;
  CHECK_THROWS_WITH(check_controller_config(c), doctest::Contains("replication_w"));
  c = {};
  c.lambda_decay = 1.0;
  CHECK_THROWS_WITH(check_controller_config(c), doctest::Contains("lambda_decay"));
}

TEST_CASE("ledger: commit boundary is inclusive") {
  BudgetLedger l(Money::from_currency(60));
  REQUIRE(l.commit(Money::from_currency(59.98)) == CommitResult::kAccepted);
  CHECK(l.commit(kReward) == CommitResult::kAccepted);
  CHECK(l.headroom() == Money{});

  BudgetLedger r(Money::from_currency(60));
  r.commit(Money::from_currency(59.99));
  CHECK(r.commit(kReward) == CommitResult::kRefused);
  CHECK(r.committed() == Money::from_currency(59.99));
}

TEST_CASE("ledger: 3000 assignments at 0.02 spend exactly 60") {
  BudgetLedger l(Money::from_currency(60));
  for (int i = 0; i < 3000; ++i) {
    REQUIRE(l.commit(kReward) == CommitResult::kAccepted);
    l.charge(kReward);
  }
  CHECK(l.spent() == Money::from_currency(60));
  CHECK(l.commit(Money{1}) == CommitResult::kRefused);
}

TEST_CASE("ledger: release returns headroom, bad amounts throw") {
  BudgetLedger l(Money::from_currency(1));
  l.commit(Money::from_currency(0.5));
  l.release(Money::from_currency(0.5));
  CHECK(l.headroom() == Money::from_currency(1));
  CHECK_THROWS_AS(l.commit(Money{-1}), Error);
  CHECK_THROWS_AS(l.charge(Money{1}), Error);
}

TEST_CASE("property: spent + committed never exceeds the budget") {
  auto rng = seeded_rng(41, "test/ledger");
  for (int trial = 0; trial < 300; ++trial) {
    BudgetLedger l(Money{static_cast<std::int64_t>(1 + rng.uniform_below(1'000'000))});
    std::vector<Money> open;
    for (int step = 0; step < 200; ++step) {
      const auto u = rng.uniform_below(3);
      if (u == 0 || open.empty()) {
        const Money m{static_cast<std::int64_t>(rng.uniform_below(50'000))};
        if (l.commit(m) == CommitResult::kAccepted) open.push_back(m);
      } else {
        const auto i = rng.uniform_below(open.size());
        if (u == 1) l.charge(open[i]); else l.release(open[i]);
        open.erase(open.begin() + static_cast<long>(i));
      }
      REQUIRE(l.spent() + l.committed() <= l.budget());
      REQUIRE(l.spent().micros >= 0);
    }
  }
}

TEST_CASE("SLO checks") {
  check_slo({0.8, Money::from_currency(60), SimTime::from_units(100)});
  CHECK_THROWS_WITH(check_slo({0.8, Money{}, SimTime::from_units(100)}),
                    doctest::Contains("budget"));
  CHECK_THROWS_WITH(check_slo({0.0, Money{1}, SimTime::from_units(100)}),
                    doctest::Contains("accuracy"));
  CHECK_THROWS_WITH(check_slo({0.8, Money{1}, SimTime{}}), doctest::Contains("deadline"));
}

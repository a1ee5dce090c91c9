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


#include <string>

#include "doctest.h"
#include "hmflow/sim.hpp"
#include "hmflow/task.hpp"

using namespace hmflow;

namespace {

SimTime at(double u) { return SimTime::from_units(u); }
const Money kReward = Money::from_currency(0.02);

Microtask human_microtask(int id = 1) {
  Microtask m;
  m.id = id;
  m.node_id = "n";
  m.answer_domain = make_answer_domain({"pos", "neg", "neutral"});
  return m;
}

WTask spawn3(Microtask& m) { return spawn_wtask(m, 3, {at(100), at(500)}, kReward); }

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kOk;
}

}  // namespace

TEST_CASE("answer domains need two distinct labels") {
  CHECK(make_answer_domain({"a", "b"})->size() == 2);
  CHECK(code_of([] { make_answer_domain({"a"}); }) == ErrorCode::kInvalidArgument);
  CHECK(code_of([] { make_answer_domain({"a", "a"}); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("microtask status only moves forward") {
  auto m = human_microtask();
  advance_status(m, MicrotaskStatus::kInFlight);
  advance_status(m, MicrotaskStatus::kInFlight);
  CHECK(m.status == MicrotaskStatus::kInFlight);
  CHECK(code_of([&] { advance_status(m, MicrotaskStatus::kUnassigned); }) ==
        ErrorCode::kPrecondition);
  advance_status(m, MicrotaskStatus::kEvaluated);
  CHECK(code_of([&] { advance_status(m, MicrotaskStatus::kInFlight); }) ==
        ErrorCode::kPrecondition);
}

TEST_CASE("spawn_wtask examples") {
  for (int w : {3, 5}) {
    auto m = human_microtask();
    const auto t = spawn_wtask(m, w, {at(100), at(500)}, kReward);
    CHECK(t.state == WTaskState::kPicked);
    CHECK(t.assignments.empty());
    CHECK(t.target() == w);
    CHECK(t.reward == kReward);
    CHECK(m.status == MicrotaskStatus::kInFlight);
  }
  auto m = human_microtask();
  const auto t = spawn_wtask(m, 1, {at(0), at(1)}, Money{});
  CHECK(t.target() == 1);
  CHECK(t.reward == Money{});
}

TEST_CASE("spawn_wtask errors") {
  auto m = human_microtask();
  m.route = Route::kMachine;
  CHECK(code_of([&] { spawn_wtask(m, 3, {at(1), at(2)}, kReward); }) ==
        ErrorCode::kPrecondition);
  m.route = Route::kHuman;
  CHECK(code_of([&] { spawn_wtask(m, 0, {at(1), at(2)}, kReward); }) ==
        ErrorCode::kInvalidArgument);
  CHECK(code_of([&] { spawn_wtask(m, 3, {at(3), at(2)}, kReward); }) ==
        ErrorCode::kInvalidArgument);
  CHECK(m.status == MicrotaskStatus::kUnassigned);
}

TEST_CASE("record_return examples") {
  auto m = human_microtask();
  auto t = spawn3(m);
  for (const char* a : {"w1", "w2", "w3"}) issue_assignment(t, a, at(10), kReward);

  CHECK(record_return(t, "w1", 0, at(20)) == AssignmentOutcome::kReturned);
  CHECK(t.state == WTaskState::kPicked);
  CHECK(record_return(t, "w2", 1, at(30)) == AssignmentOutcome::kReturned);
  CHECK(t.state == WTaskState::kPicked);
  CHECK(record_return(t, "w3", 0, at(100)) == AssignmentOutcome::kReturned);
  CHECK(t.state == WTaskState::kDone);
  CHECK(t.returned_answers() == std::vector<Category>{0, 1, 0});
  CHECK(t.assignments[0].returned_at == at(20));
}

TEST_CASE("a late return times out and loses its answer") {
  auto m = human_microtask();
  auto t = spawn3(m);
  issue_assignment(t, "w1", at(10), kReward);
  CHECK(record_return(t, "w1", 2, at(100.000001)) == AssignmentOutcome::kTimedOut);
  CHECK_FALSE(t.assignments[0].answer.has_value());
  CHECK_FALSE(t.assignments[0].returned_at.has_value());
  CHECK(t.returned_answers().empty());
}

TEST_CASE("record_return errors") {
  auto m = human_microtask();
  auto t = spawn3(m);
  issue_assignment(t, "w1", at(10), kReward);
  CHECK(code_of([&] { record_return(t, "nobody", 0, at(20)); }) == ErrorCode::kNotFound);
  record_return(t, "w1", 0, at(20));
  CHECK(code_of([&] { record_return(t, "w1", 0, at(21)); }) == ErrorCode::kPrecondition);
}

TEST_CASE("issue_assignment guards") {
  auto m = human_microtask();
  auto t = spawn_wtask(m, 2, {at(100), at(500)}, kReward);
  issue_assignment(t, "w1", at(1), kReward);
  CHECK(code_of([&] { issue_assignment(t, "w1", at(2), kReward); }) ==
        ErrorCode::kPrecondition);
  CHECK(code_of([&] { issue_assignment(t, "w2", at(101), kReward); }) ==
        ErrorCode::kPrecondition);
  issue_assignment(t, "w2", at(100), kReward);
  CHECK(code_of([&] { issue_assignment(t, "w3", at(50), kReward); }) ==
        ErrorCode::kPrecondition);
}

TEST_CASE("expire_overdue examples") {
  auto m = human_microtask();
  auto t = spawn_wtask(m, 1, {at(500), at(900)}, kReward);
  issue_assignment(t, "w1", at(10), kReward);

  CHECK(expire_overdue({&t}, at(499)).empty());
  CHECK(t.assignments[0].outcome == AssignmentOutcome::kPending);

  const auto e = expire_overdue({&t}, at(501));
  REQUIRE(e.size() == 1);
  CHECK(e[0].agent_ids == std::vector<std::string>{"w1"});
  CHECK(e[0].released == kReward);
  CHECK(t.assignments[0].outcome == AssignmentOutcome::kTimedOut);
  CHECK(t.state == WTaskState::kDone);

  auto m2 = human_microtask(2);
  auto done = spawn_wtask(m2, 3, {at(500), at(900)}, kReward);
  for (const char* a : {"a", "b", "c"}) {
    issue_assignment(done, a, at(1), kReward);
    record_return(done, a, 0, at(2));
  }
  CHECK(expire_overdue({&done}, at(100000)).empty());
}

TEST_CASE("reassign and escalate reopen slots") {
  auto m = human_microtask();
  auto t = spawn_wtask(m, 1, {at(10), at(900)}, kReward);
  issue_assignment(t, "w1", at(1), kReward);
  expire_overdue({&t}, at(11));
  CHECK(reassignable(t) == 1);
  CHECK(code_of([&] { reassign(t, 2); }) == ErrorCode::kPrecondition);
  reassign(t, 1);
  CHECK(t.state == WTaskState::kPicked);
  CHECK(t.open_slots() == 1);
  CHECK(reassignable(t) == 0);

  renew_completion_deadline(t, at(50));
  CHECK(t.completion_deadline == at(50));
  renew_completion_deadline(t, at(20));
  CHECK(t.completion_deadline == at(50));
  renew_completion_deadline(t, at(5000));
  CHECK(t.completion_deadline == at(900));

  issue_assignment(t, "w1", at(60), kReward);  // the timed-out worker may retry
  record_return(t, "w1", 1, at(61));
  CHECK(t.state == WTaskState::kDone);
  escalate(t);
  CHECK(t.state == WTaskState::kPicked);
  CHECK(t.target() == 3);
}

TEST_CASE("property: random w-task lifecycles keep the record invariants") {
  auto rng = seeded_rng(3, "test/wtask");
  for (int trial = 0; trial < 3000; ++trial) {
    auto m = human_microtask(trial);
    const int w = 1 + 2 * static_cast<int>(rng.uniform_below(3));
    auto t = spawn_wtask(m, w, {at(50), at(1000)}, kReward);
    double now = 0.0;
    for (int step = 0; step < 40; ++step) {
      now += rng.uniform01() * 5.0;
      const std::string agent = "a" + std::to_string(rng.uniform_below(6));
      switch (rng.uniform_below(5)) {
        case 0:
        case 1:
          if (t.open_slots() > 0 && !t.has_live_assignment(agent) &&
              at(now) <= t.completion_deadline) {
            issue_assignment(t, agent, at(now), kReward);
          }
          break;
        case 2:
          for (const auto& a : t.assignments) {
            if (a.agent_id == agent && a.outcome == AssignmentOutcome::kPending) {
              record_return(t, agent, static_cast<int>(rng.uniform_below(3)), at(now));
              break;
            }
          }
          break;
        case 3:
          expire_overdue({&t}, at(now));
          if (reassignable(t) > 0) reassign(t, 1);
          break;
        case 4:
          if (t.extras < 2) escalate(t);
          renew_completion_deadline(t, at(now + 40));
          break;
      }
      // Invariants.
      CHECK(t.completion_deadline <= t.expiry_deadline);
      CHECK(static_cast<int>(t.assignments.size()) <= t.target());
      CHECK(t.target() <= w + t.extras + t.count(AssignmentOutcome::kTimedOut));
      Money paid;
      for (const auto& a : t.assignments) {
        if (a.outcome == AssignmentOutcome::kReturned) paid += a.reward;
        CHECK((a.outcome == AssignmentOutcome::kReturned) ==
              (a.answer.has_value() && a.returned_at.has_value()));
        if (a.returned_at) CHECK(*a.returned_at >= a.issued_at);
      }
      CHECK(paid <= (w + t.extras) * kReward);
      for (std::size_t i = 0; i < t.assignments.size(); ++i) {
        for (std::size_t j = i + 1; j < t.assignments.size(); ++j) {
          const auto& a = t.assignments[i];
          const auto& b = t.assignments[j];
          const bool overlap = a.agent_id == b.agent_id &&
                               a.outcome == AssignmentOutcome::kPending &&
                               b.outcome == AssignmentOutcome::kPending;
          CHECK_FALSE(overlap);
        }
      }
      const bool done = t.count(AssignmentOutcome::kPending) == 0 && t.open_slots() <= 0;
      CHECK((t.state == WTaskState::kDone) == done);
    }
  }
}

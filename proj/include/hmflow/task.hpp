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

// Microtask and w-task lifecycle.
//
// A human-routed microtask is instantiated as a w-task that collects up to
// `target()` assignment records. Timeouts never reopen a slot by themselves;
// the controller reopens them explicitly with `reassign`, and asks for extra
// votes with `escalate`. A w-task is Done once it has no pending assignment
// and every slot it asked for has been issued.

#ifndef HMFLOW_TASK_HPP_
#define HMFLOW_TASK_HPP_

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hmflow/types.hpp"

namespace hmflow {

// Index into a node's answer domain.
using Category = int;
using MicrotaskId = int;
using AnswerDomain = std::shared_ptr<const std::vector<std::string>>;

// Throws Error(kInvalidArgument) unless the domain has >= 2 distinct labels.
AnswerDomain make_answer_domain(std::vector<std::string> labels);

enum class Route { kHuman, kMachine };
enum class MicrotaskStatus { kUnassigned, kInFlight, kEvaluated };

const char* to_string(Route r);
const char* to_string(MicrotaskStatus s);

struct Microtask {
  MicrotaskId id = 0;
  std::string node_id;
  std::string payload_ref;
  AnswerDomain answer_domain;
  Route route = Route::kHuman;
  MicrotaskStatus status = MicrotaskStatus::kUnassigned;

  int category_count() const {
    return static_cast<int>(answer_domain->size());
  }
};

// Enforces Unassigned -> InFlight -> Evaluated. Re-entering the current
// state is a no-op; going backwards throws Error(kPrecondition).
void advance_status(Microtask& m, MicrotaskStatus next);

enum class AssignmentOutcome { kPending, kReturned, kTimedOut };
const char* to_string(AssignmentOutcome o);

struct AssignmentRecord {
  std::string agent_id;
  SimTime issued_at;
  std::optional<SimTime> returned_at;
  std::optional<Category> answer;
  AssignmentOutcome outcome = AssignmentOutcome::kPending;
  Money reward;
};

enum class WTaskState { kPicked, kDone };

struct WTask {
  MicrotaskId microtask_id = 0;
  int replication_w = 1;
  int extras = 0;      // escalation votes requested
  int reassigned = 0;  // slots reopened after timeouts
  std::vector<AssignmentRecord> assignments;
  WTaskState state = WTaskState::kPicked;
  SimTime completion_deadline;
  SimTime expiry_deadline;
  Money reward;  // base reward per assignment at spawn time

  int target() const { return replication_w + extras + reassigned; }
  int open_slots() const {
    return target() - static_cast<int>(assignments.size());
  }
  int count(AssignmentOutcome o) const;
  // True when `agent_id` holds a pending or returned record here.
  bool has_live_assignment(const std::string& agent_id) const;
  std::vector<Category> returned_answers() const;
};

// Creates the w-task of a human-routed microtask and moves the microtask to
// InFlight. `deadlines` is (completion, expiry).
WTask spawn_wtask(Microtask& microtask, int w,
                  std::pair<SimTime, SimTime> deadlines, Money reward);

// Adds a pending record. Requires an open slot, a worker not already holding
// a live record on this w-task, and at <= completion_deadline.
AssignmentRecord& issue_assignment(WTask& wtask, const std::string& agent_id,
                                   SimTime at, Money reward);

// Marks the agent's pending record Returned, or TimedOut when `at` is past
// the completion deadline (the answer is then discarded). A return for a
// record that already timed out yields kTimedOut without changing state.
// Throws Error(kNotFound) for an unknown agent and Error(kPrecondition) for a
// duplicate return.
AssignmentOutcome record_return(WTask& wtask, const std::string& agent_id,
                                Category answer, SimTime at);

struct ExpiredAssignments {
  MicrotaskId microtask_id = 0;
  std::vector<std::string> agent_ids;
  Money released;  // sum of rewards reserved by the expired records
};

// Times out every pending record whose w-task completion deadline is before
// `now`. Only w-tasks with at least one expiry are reported.
std::vector<ExpiredAssignments> expire_overdue(std::vector<WTask*> wtasks,
                                               SimTime now);

// Reopens `slots` slots after timeouts. Cannot exceed the number of timed-out
// records not yet reopened.
void reassign(WTask& wtask, int slots);
int reassignable(const WTask& wtask);

// Requests one more vote.
void escalate(WTask& wtask);

// Moves the completion deadline forward to min(candidate, expiry). Never
// moves it backwards.
void renew_completion_deadline(WTask& wtask, SimTime candidate);

// Recomputes Picked/Done from the records.
void refresh_state(WTask& wtask);

}  // namespace hmflow

#endif  // HMFLOW_TASK_HPP_

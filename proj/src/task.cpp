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

#include "hmflow/task.hpp"

#include <algorithm>
#include <set>

namespace hmflow {

AnswerDomain make_answer_domain(std::vector<std::string> labels) {
  if (labels.size() < 2) {
    fail(ErrorCode::kInvalidArgument,
         "answer domain needs at least 2 categories");
  }
  std::set<std::string> seen;
  for (const auto& l : labels) {
    if (!seen.insert(l).second) {
      fail(ErrorCode::kInvalidArgument,
           "duplicate category '" + l + "' in answer domain");
    }
  }
  return std::make_shared<const std::vector<std::string>>(std::move(labels));
}

const char* to_string(Route r) {
  return r == Route::kHuman ? "human" : "machine";
}

const char* to_string(MicrotaskStatus s) {
  switch (s) {
    case MicrotaskStatus::kUnassigned:
      return "unassigned";
    case MicrotaskStatus::kInFlight:
      return "in_flight";
    case MicrotaskStatus::kEvaluated:
      return "evaluated";
  }
  return "unassigned";
}

const char* to_string(AssignmentOutcome o) {
  switch (o) {
    case AssignmentOutcome::kPending:
      return "pending";
    case AssignmentOutcome::kReturned:
      return "returned";
    case AssignmentOutcome::kTimedOut:
      return "timed_out";
  }
  return "pending";
}

void advance_status(Microtask& m, MicrotaskStatus next) {
  if (static_cast<int>(next) < static_cast<int>(m.status)) {
    fail(ErrorCode::kPrecondition,
         std::string("microtask cannot move from ") + to_string(m.status) +
             " to " + to_string(next));
  }
  m.status = next;
}

int WTask::count(AssignmentOutcome o) const {
  return static_cast<int>(
      std::count_if(assignments.begin(), assignments.end(),
                    [o](const auto& a) { return a.outcome == o; }));
}

bool WTask::has_live_assignment(const std::string& agent_id) const {
  return std::any_of(assignments.begin(), assignments.end(),
                     [&](const auto& a) {
                       return a.agent_id == agent_id &&
                              a.outcome != AssignmentOutcome::kTimedOut;
                     });
}

std::vector<Category> WTask::returned_answers() const {
  std::vector<Category> out;
  for (const auto& a : assignments) {
    if (a.outcome == AssignmentOutcome::kReturned) out.push_back(*a.answer);
  }
  return out;
}

void refresh_state(WTask& wtask) {
  const bool done = wtask.count(AssignmentOutcome::kPending) == 0 &&
                    wtask.open_slots() <= 0;
  wtask.state = done ? WTaskState::kDone : WTaskState::kPicked;
}

WTask spawn_wtask(Microtask& microtask, int w,
                  std::pair<SimTime, SimTime> deadlines, Money reward) {
  if (microtask.route != Route::kHuman) {
    fail(ErrorCode::kPrecondition, "w-tasks are only spawned for human routes");
  }
  if (w < 1) fail(ErrorCode::kInvalidArgument, "replication w must be >= 1");
  if (deadlines.first > deadlines.second) {
    fail(ErrorCode::kInvalidArgument,
         "completion deadline must not exceed expiry deadline");
  }
  if (reward.micros < 0) fail(ErrorCode::kInvalidArgument, "negative reward");
  advance_status(microtask, MicrotaskStatus::kInFlight);
  WTask t;
  t.microtask_id = microtask.id;
  t.replication_w = w;
  t.completion_deadline = deadlines.first;
  t.expiry_deadline = deadlines.second;
  t.reward = reward;
  return t;
}

AssignmentRecord& issue_assignment(WTask& wtask, const std::string& agent_id,
                                   SimTime at, Money reward) {
  if (wtask.open_slots() <= 0) {
    fail(ErrorCode::kPrecondition, "w-task has no open slot");
  }
  if (wtask.has_live_assignment(agent_id)) {
    fail(ErrorCode::kPrecondition,
         "agent '" + agent_id + "' already works on this w-task");
  }
  if (at > wtask.completion_deadline) {
    fail(ErrorCode::kPrecondition, "assignment issued past completion deadline");
  }
  AssignmentRecord r;
  r.agent_id = agent_id;
  r.issued_at = at;
  r.reward = reward;
  wtask.assignments.push_back(std::move(r));
  wtask.state = WTaskState::kPicked;
  return wtask.assignments.back();
}

AssignmentOutcome record_return(WTask& wtask, const std::string& agent_id,
                                Category answer, SimTime at) {
  AssignmentRecord* pending = nullptr;
  bool any = false;
  bool returned = false;
  for (auto& a : wtask.assignments) {
    if (a.agent_id != agent_id) continue;
    any = true;
    if (a.outcome == AssignmentOutcome::kPending) pending = &a;
    if (a.outcome == AssignmentOutcome::kReturned) returned = true;
  }
  if (!any) fail(ErrorCode::kNotFound, "unknown agent '" + agent_id + "'");
  if (!pending) {
    if (returned) {
      fail(ErrorCode::kPrecondition,
           "duplicate return from agent '" + agent_id + "'");
    }
    return AssignmentOutcome::kTimedOut;
  }
  if (at < pending->issued_at) {
    fail(ErrorCode::kPrecondition, "return precedes issue");
  }
  if (at > wtask.completion_deadline) {
    pending->outcome = AssignmentOutcome::kTimedOut;
  } else {
    pending->outcome = AssignmentOutcome::kReturned;
    pending->returned_at = at;
    pending->answer = answer;
  }
  refresh_state(wtask);
  return pending->outcome;
}

std::vector<ExpiredAssignments> expire_overdue(std::vector<WTask*> wtasks,
                                               SimTime now) {
  std::vector<ExpiredAssignments> out;
  for (WTask* t : wtasks) {
    if (now <= t->completion_deadline) continue;
    ExpiredAssignments e;
    e.microtask_id = t->microtask_id;
    for (auto& a : t->assignments) {
      if (a.outcome != AssignmentOutcome::kPending) continue;
      a.outcome = AssignmentOutcome::kTimedOut;
      e.agent_ids.push_back(a.agent_id);
      e.released += a.reward;
    }
    if (!e.agent_ids.empty()) {
      refresh_state(*t);
      out.push_back(std::move(e));
    }
  }
  return out;
}

int reassignable(const WTask& wtask) {
  return wtask.count(AssignmentOutcome::kTimedOut) - wtask.reassigned;
}

void reassign(WTask& wtask, int slots) {
  if (slots < 0 || slots > reassignable(wtask)) {
    fail(ErrorCode::kPrecondition, "more reassignments than timed-out records");
  }
  wtask.reassigned += slots;
  refresh_state(wtask);
}

void escalate(WTask& wtask) {
  ++wtask.extras;
  refresh_state(wtask);
}

void renew_completion_deadline(WTask& wtask, SimTime candidate) {
  const SimTime capped = std::min(candidate, wtask.expiry_deadline);
  wtask.completion_deadline = std::max(wtask.completion_deadline, capped);
}

}  // namespace hmflow

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

#include "hmflow/slo.hpp"

namespace hmflow {

void check_slo(const SloSpec& slo) {
  if (!(slo.accuracy_target > 0.0 && slo.accuracy_target <= 1.0)) {
    fail(ErrorCode::kInvalidArgument, "slo.accuracy must lie in (0, 1]");
  }
  if (slo.budget.micros <= 0) {
    fail(ErrorCode::kInvalidArgument, "slo.budget must be > 0");
  }
  if (slo.deadline.ticks <= 0) {
    fail(ErrorCode::kInvalidArgument, "slo.deadline must be > 0");
  }
}

BudgetLedger::BudgetLedger(Money budget) : budget_(budget) {
  if (budget.micros < 0) {
    fail(ErrorCode::kInvalidArgument, "budget must be >= 0");
  }
}

CommitResult BudgetLedger::commit(Money reward) {
  if (reward.micros < 0) {
    fail(ErrorCode::kInvalidArgument, "reward must be >= 0");
  }
  if (spent_ + committed_ + reward > budget_) return CommitResult::kRefused;
  committed_ += reward;
  return CommitResult::kAccepted;
}

void BudgetLedger::charge(Money reward) {
  if (reward.micros < 0 || reward > committed_) {
    fail(ErrorCode::kPrecondition, "charge exceeds committed amount");
  }
  committed_ -= reward;
  spent_ += reward;
}

void BudgetLedger::release(Money reward) {
  if (reward.micros < 0 || reward > committed_) {
    fail(ErrorCode::kPrecondition, "release exceeds committed amount");
  }
  committed_ -= reward;
}

}  // namespace hmflow

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

#ifndef HMFLOW_SLO_HPP_
#define HMFLOW_SLO_HPP_

#include "hmflow/types.hpp"

namespace hmflow {

// Requester objectives: minimum accuracy, maximum spend, completion deadline.
struct SloSpec {
  double accuracy_target = 1.0;  // (0, 1]
  Money budget;                  // > 0
  SimTime deadline;              // > 0, measured from task start

  bool operator==(const SloSpec&) const = default;
};

// Throws Error(kInvalidArgument) naming the offending field.
void check_slo(const SloSpec& slo);

enum class CommitResult { kAccepted, kRefused };

// Monotone spend accounting against a budget. Rewards are reserved when an
// assignment is issued, charged when it is returned and released when it
// times out, so spent + committed <= budget holds at every instant.
class BudgetLedger {
 public:
  BudgetLedger() = default;
  explicit BudgetLedger(Money budget);

  CommitResult commit(Money reward);
  void charge(Money reward);   // committed -> spent
  void release(Money reward);  // committed -> free

  Money spent() const { return spent_; }
  Money committed() const { return committed_; }
  Money budget() const { return budget_; }
  Money headroom() const { return budget_ - spent_ - committed_; }
  bool can_afford(Money reward) const { return headroom() >= reward; }

 private:
  Money spent_;
  Money committed_;
  Money budget_;
};

}  // namespace hmflow

#endif  // HMFLOW_SLO_HPP_

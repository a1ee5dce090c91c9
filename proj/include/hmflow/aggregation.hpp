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

#ifndef HMFLOW_AGGREGATION_HPP_
#define HMFLOW_AGGREGATION_HPP_

#include <optional>
#include <span>
#include <vector>

#include "hmflow/task.hpp"

namespace hmflow {

struct VoteSet {
  MicrotaskId microtask_id = 0;
  int category_count = 2;
  std::vector<Category> votes;  // returned answers only
};

enum class ConsensusStatus { kConsensus, kNoConsensus, kEmpty };
const char* to_string(ConsensusStatus s);

enum class VotingRule { kMajority, kPlurality };
const char* to_string(VotingRule r);

struct ConsensusResult {
  MicrotaskId microtask_id = 0;
  std::optional<Category> decision;
  // Share of the votes held by the most popular label.
  double support = 0.0;
  ConsensusStatus status = ConsensusStatus::kEmpty;

  bool operator==(const ConsensusResult&) const = default;
};

// Strict majority: a label needs more than half of the votes. Throws
// Error(kInvalidArgument) for a vote outside the answer domain.
ConsensusResult majority_vote(const VoteSet& votes);

// Decision is the unique most popular label, if any. Status is still
// Consensus only when that label has a strict majority.
ConsensusResult plurality_vote(const VoteSet& votes);

ConsensusResult aggregate(const VoteSet& votes, VotingRule rule);

// Fraction of results with status Consensus; 0 for no results.
double node_consensus_rate(std::span<const ConsensusResult> results);

// Probability that `rule` applied to w independent answers recovers the
// truth, when each answer is correct with probability p and otherwise
// uniform over the C-1 wrong labels. Enumerates every composition of the w
// votes over the C labels; bounded to odd w <= 9 and 2 <= C <= 6.
double majority_accuracy_analytic(double p, int w, int C,
                                  VotingRule rule = VotingRule::kMajority);

}  // namespace hmflow

#endif  // HMFLOW_AGGREGATION_HPP_

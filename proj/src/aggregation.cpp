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

#include "hmflow/aggregation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace hmflow {

const char* to_string(ConsensusStatus s) {
  switch (s) {
    case ConsensusStatus::kConsensus:
      return "consensus";
    case ConsensusStatus::kNoConsensus:
      return "no_consensus";
    case ConsensusStatus::kEmpty:
      return "empty";
  }
  return "empty";
}

const char* to_string(VotingRule r) {
  return r == VotingRule::kMajority ? "majority" : "plurality";
}

namespace {

struct Tally {
  std::vector<int> counts;
  int total = 0;
  Category leader = 0;
  int leader_votes = 0;
  bool leader_unique = false;
};

Tally tally(const VoteSet& v) {
  Tally t;
  t.counts.assign(static_cast<std::size_t>(std::max(v.category_count, 0)), 0);
  for (Category c : v.votes) {
    if (c < 0 || c >= v.category_count) {
      fail(ErrorCode::kInvalidArgument, "vote outside the answer domain");
    }
    ++t.counts[static_cast<std::size_t>(c)];
    ++t.total;
  }
  for (Category c = 0; c < v.category_count; ++c) {
    const int n = t.counts[static_cast<std::size_t>(c)];
    if (n > t.leader_votes) {
      t.leader = c;
      t.leader_votes = n;
      t.leader_unique = true;
    } else if (n == t.leader_votes && n > 0) {
      t.leader_unique = false;
    }
  }
  return t;
}

}  // namespace

ConsensusResult majority_vote(const VoteSet& votes) {
  const Tally t = tally(votes);
  ConsensusResult r;
  r.microtask_id = votes.microtask_id;
  if (t.total == 0) return r;
  r.support = static_cast<double>(t.leader_votes) / t.total;
  if (2 * t.leader_votes > t.total) {
    r.decision = t.leader;
    r.status = ConsensusStatus::kConsensus;
  } else {
    r.status = ConsensusStatus::kNoConsensus;
  }
  return r;
}

ConsensusResult plurality_vote(const VoteSet& votes) {
  const Tally t = tally(votes);
  ConsensusResult r;
  r.microtask_id = votes.microtask_id;
  if (t.total == 0) return r;
  r.support = static_cast<double>(t.leader_votes) / t.total;
  if (t.leader_unique) r.decision = t.leader;
  r.status = 2 * t.leader_votes > t.total ? ConsensusStatus::kConsensus
                                          : ConsensusStatus::kNoConsensus;
  return r;
}

ConsensusResult aggregate(const VoteSet& votes, VotingRule rule) {
  return rule == VotingRule::kMajority ? majority_vote(votes)
                                       : plurality_vote(votes);
}

double node_consensus_rate(std::span<const ConsensusResult> results) {
  if (results.empty()) return 0.0;
  const auto n = std::count_if(results.begin(), results.end(), [](auto& r) {
    return r.status == ConsensusStatus::kConsensus;
  });
  return static_cast<double>(n) / static_cast<double>(results.size());
}

double majority_accuracy_analytic(double p, int w, int C, VotingRule rule) {
  if (!(p >= 0.0 && p <= 1.0)) {
    fail(ErrorCode::kInvalidArgument, "p must lie in [0, 1]");
  }
  if (w < 1 || w % 2 == 0 || w > 9) {
    fail(ErrorCode::kInvalidArgument, "w must be odd and <= 9");
  }
  if (C < 2 || C > 6) {
    fail(ErrorCode::kInvalidArgument, "C must lie in [2, 6]");
  }
  const double q = (1.0 - p) / (C - 1);
  std::vector<double> fact(static_cast<std::size_t>(w) + 1, 1.0);
  for (int i = 1; i <= w; ++i) fact[i] = fact[i - 1] * i;

  // counts[0] is the truth, the rest are the wrong labels.
  std::vector<int> counts(static_cast<std::size_t>(C), 0);
  double total = 0.0;
  std::function<void(int, int)> place = [&](int label, int left) {
    if (label == C - 1) {
      counts[label] = left;
      const int truth = counts[0];
      const int best_wrong =
          C > 1 ? *std::max_element(counts.begin() + 1, counts.end()) : 0;
      const bool win = rule == VotingRule::kMajority ? 2 * truth > w
                                                     : truth > best_wrong;
      if (!win) return;
      double coef = fact[w];
      for (int c : counts) coef /= fact[c];
      total += coef * std::pow(p, truth) * std::pow(q, w - truth);
      return;
    }
    for (int k = 0; k <= left; ++k) {
      counts[label] = k;
      place(label + 1, left - k);
    }
  };
  place(0, w);
  return std::min(1.0, total);
}

}  // namespace hmflow

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


#include <algorithm>
#include <vector>

#include "doctest.h"
#include "hmflow/aggregation.hpp"
#include "hmflow/sim.hpp"

using namespace hmflow;

namespace {

constexpr Category A = 0, B = 1, C = 2;

VoteSet votes(std::vector<Category> v, int categories = 3) {
  return VoteSet{7, categories, std::move(v)};
}

}  // namespace

TEST_CASE("majority_vote examples") {
  auto r = majority_vote(votes({A, A, B}));
  CHECK(r.status == ConsensusStatus::kConsensus);
  CHECK(r.decision == A);
  CHECK(r.support == doctest::Approx(2.0 / 3.0));
  CHECK(r.microtask_id == 7);

  r = majority_vote(votes({A, B, A, C, A}));
  CHECK(r.status == ConsensusStatus::kConsensus);
  CHECK(r.decision == A);
  CHECK(r.support == doctest::Approx(0.6));

  r = majority_vote(votes({A, B}));
  CHECK(r.status == ConsensusStatus::kNoConsensus);
  CHECK_FALSE(r.decision.has_value());
  CHECK(r.support == doctest::Approx(0.5));

  r = majority_vote(votes({}));
  CHECK(r.status == ConsensusStatus::kEmpty);
  CHECK(r.support == 0.0);
}

TEST_CASE("votes outside the domain are rejected") {
  CHECK_THROWS_AS(majority_vote(votes({A, 3})), Error);
  CHECK_THROWS_AS(majority_vote(votes({-1})), Error);
}

TEST_CASE("plurality decides without a strict majority") {
  auto r = plurality_vote(votes({A, B, C, A}));
  CHECK(r.decision == A);
  CHECK(r.status == ConsensusStatus::kNoConsensus);
  r = plurality_vote(votes({A, B}));
  CHECK_FALSE(r.decision.has_value());
  r = aggregate(votes({B, B, A}), VotingRule::kPlurality);
  CHECK(r.decision == B);
  CHECK(r.status == ConsensusStatus::kConsensus);
}

TEST_CASE("node_consensus_rate examples") {
  std::vector<ConsensusResult> rs(1000);
  for (int i = 0; i < 1000; ++i) {
    rs[i].status = i < 918 ? ConsensusStatus::kConsensus : ConsensusStatus::kNoConsensus;
  }
  CHECK(node_consensus_rate(rs) == doctest::Approx(0.918));
  for (auto& r : rs) r.status = ConsensusStatus::kConsensus;
  CHECK(node_consensus_rate(rs) == 1.0);
  for (auto& r : rs) r.status = ConsensusStatus::kNoConsensus;
  CHECK(node_consensus_rate(rs) == 0.0);
  CHECK(node_consensus_rate({}) == 0.0);
}

TEST_CASE("analytic majority accuracy: frozen values") {
  CHECK(majority_accuracy_analytic(0.55, 3, 2) == doctest::Approx(0.57475).epsilon(1e-12));
  CHECK(majority_accuracy_analytic(0.7, 5, 4) == doctest::Approx(0.83692).epsilon(1e-12));
  CHECK(majority_accuracy_analytic(0.8, 3, 6) == doctest::Approx(0.896).epsilon(1e-12));
  CHECK(majority_accuracy_analytic(0.6, 3, 6, VotingRule::kPlurality) ==
        doctest::Approx(0.648).epsilon(1e-12));
  for (int w : {1, 3, 5, 7, 9}) {
    for (int c = 2; c <= 6; ++c) {
      CHECK(majority_accuracy_analytic(1.0, w, c) == doctest::Approx(1.0));
    }
  }
  for (double p : {0.1, 0.37, 0.5, 0.9}) {
    CHECK(majority_accuracy_analytic(p, 1, 4) == doctest::Approx(p));
  }
}

TEST_CASE("analytic majority accuracy: closed form for w = 3, C = 2") {
  for (int i = 0; i <= 100; ++i) {
    const double p = i / 100.0;
    CHECK(majority_accuracy_analytic(p, 3, 2) ==
          doctest::Approx(p * p * p + 3 * p * p * (1 - p)).epsilon(1e-12));
  }
}

TEST_CASE("analytic bounds are enforced") {
  CHECK_THROWS_AS(majority_accuracy_analytic(0.5, 2, 2), Error);
  CHECK_THROWS_AS(majority_accuracy_analytic(0.5, 11, 2), Error);
  CHECK_THROWS_AS(majority_accuracy_analytic(0.5, 3, 7), Error);
  CHECK_THROWS_AS(majority_accuracy_analytic(1.5, 3, 2), Error);
}

TEST_CASE("property: majority amplification on a grid") {
  for (int i = 0; i <= 200; ++i) {
    const double p = i / 200.0;
    const double m = majority_accuracy_analytic(p, 3, 2);
    if (p >= 0.5) CHECK(m >= p - 1e-12);
    if (p <= 0.5) CHECK(m <= p + 1e-12);
  }
}

TEST_CASE("property: permutation invariance and monotonicity") {
  auto rng = seeded_rng(5, "test/votes");
  for (int trial = 0; trial < 5000; ++trial) {
    const int c = 2 + static_cast<int>(rng.uniform_below(5));
    const int n = static_cast<int>(rng.uniform_below(10));
    std::vector<Category> v;
    for (int i = 0; i < n; ++i) v.push_back(static_cast<Category>(rng.uniform_below(c)));
    const auto base = majority_vote(votes(v, c));
    const auto plural = plurality_vote(votes(v, c));
    for (int k = 0; k < 4; ++k) {
      auto shuffled = v;
      for (int i = n - 1; i > 0; --i) std::swap(shuffled[i], shuffled[rng.uniform_below(i + 1)]);
      CHECK(majority_vote(votes(shuffled, c)) == base);
      CHECK(plurality_vote(votes(shuffled, c)) == plural);
    }
    if (base.status == ConsensusStatus::kConsensus) {
      auto more = v;
      more.push_back(*base.decision);
      const auto r = majority_vote(votes(more, c));
      CHECK(r.status == ConsensusStatus::kConsensus);
      CHECK(r.decision == base.decision);
      CHECK(r.support >= base.support);
    }
  }
}

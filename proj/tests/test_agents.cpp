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


#include <vector>

#include "doctest.h"
#include "hmflow/agents.hpp"
#include "hmflow/aggregation.hpp"

using namespace hmflow;

namespace {

double mean_interarrival(double rate, std::uint64_t seed, int n = 100000) {
  auto rng = seeded_rng(seed, "test/interarrival");
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += sample_interarrival(rate, rng);
  return sum / n;
}

WorkerClass klass(const std::string& name, double rate) {
  WorkerClass c;
  c.name = name;
  c.arrival_rate = rate;
  return c;
}

}  // namespace

TEST_CASE("sample_interarrival examples") {
  CHECK(mean_interarrival(0.039084, 1) == doctest::Approx(1.0 / 0.039084).epsilon(0.01));
  CHECK(mean_interarrival(1.0, 2) == doctest::Approx(1.0).epsilon(0.01));
  auto a = seeded_rng(9, "x"), b = seeded_rng(9, "x");
  for (int i = 0; i < 100; ++i) CHECK(sample_interarrival(0.5, a) == sample_interarrival(0.5, b));
  CHECK_THROWS_AS(sample_interarrival(0.0, a), Error);
  CHECK_THROWS_AS(sample_interarrival(-1.0, a), Error);
}

TEST_CASE("property: inter-arrival means converge to 1/r") {
  for (double r : {0.01, 0.039084, 1.0}) {
    CAPTURE(r);
    CHECK(mean_interarrival(r, 17) == doctest::Approx(1.0 / r).epsilon(0.01));
  }
}

TEST_CASE("answer_microtask examples") {
  auto rng = seeded_rng(4, "test/answers");
  for (int i = 0; i < 1000; ++i) CHECK(answer_microtask(1.0, 6, 3, rng) == 3);
  for (int i = 0; i < 1000; ++i) CHECK(answer_microtask(0.0, 2, 0, rng) == 1);
  int correct = 0;
  for (int i = 0; i < 100000; ++i) correct += answer_microtask(0.672, 6, 2, rng) == 2;
  CHECK(correct / 100000.0 == doctest::Approx(0.672).epsilon(0.005 / 0.672));
  CHECK_THROWS_AS(answer_microtask(0.5, 3, 3, rng), Error);
  CHECK_THROWS_AS(answer_microtask(0.5, 1, 0, rng), Error);
}

TEST_CASE("property: wrong answers are uniform (chi-square)") {
  auto rng = seeded_rng(6, "test/chi");
  constexpr int kN = 100000, kC = 5;
  constexpr double p = 0.4;
  std::vector<int> counts(kC);
  for (int i = 0; i < kN; ++i) ++counts[answer_microtask(p, kC, 0, rng)];
  double chi = 0.0;
  for (int c = 0; c < kC; ++c) {
    const double expected = kN * (c == 0 ? p : (1 - p) / (kC - 1));
    chi += (counts[c] - expected) * (counts[c] - expected) / expected;
  }
  CHECK(chi < 18.47);  // 4 degrees of freedom, p = 0.001
}

TEST_CASE("invert_majority_accuracy: frozen values") {
  CHECK(invert_majority_accuracy(0.574, 3, 2) == doctest::Approx(0.5494950008).epsilon(1e-8));
  CHECK(invert_majority_accuracy(0.572, 3, 2) == doctest::Approx(0.5481488319).epsilon(1e-8));
  CHECK(invert_majority_accuracy(0.804, 3, 2) == doctest::Approx(0.7161273810).epsilon(1e-8));
  for (double t : {0.4, 0.6, 0.9}) {
    CHECK(invert_majority_accuracy(t, 1, 3) == doctest::Approx(t).epsilon(1e-6));
  }
}

TEST_CASE("invert_majority_accuracy meets the target within 1e-6") {
  for (int w : {1, 3, 5, 7}) {
    for (int c : {2, 4, 6}) {
      for (double t : {0.55, 0.7, 0.9, 0.99}) {
        const double p = invert_majority_accuracy(t, w, c);
        CHECK(std::abs(majority_accuracy_analytic(p, w, c) - t) < 1e-6);
      }
    }
  }
  CHECK_THROWS_AS(invert_majority_accuracy(0.5, 3, 2), Error);
  CHECK_THROWS_AS(invert_majority_accuracy(1.0, 3, 2), Error);
  CHECK_THROWS_AS(invert_majority_accuracy(0.7, 2, 2), Error);
}

TEST_CASE("apply_incentive examples") {
  CHECK(apply_incentive(0.039084, 1.0) == doctest::Approx(0.039084));
  CHECK(apply_incentive(0.04, 1.25, 1.0) == doctest::Approx(0.05));
  CHECK(apply_incentive(0.04, 2.0, 0.0) == doctest::Approx(0.04));
  CHECK_THROWS_AS(apply_incentive(0.04, 0.9), Error);
}

TEST_CASE("service time families") {
  auto rng = seeded_rng(2, "test/service");
  ServiceTime fixed{ServiceTime::Family::kFixed};
  fixed.value = 4.0;
  CHECK(sample_service_time(fixed, rng) == 4.0);

  ServiceTime ln;
  ln.median = 2.0;
  ln.sigma = 0.5;
  std::vector<double> xs;
  for (int i = 0; i < 20001; ++i) {
    xs.push_back(sample_service_time(ln, rng));
    REQUIRE(xs.back() > 0.0);
  }
  std::nth_element(xs.begin(), xs.begin() + 10000, xs.end());
  CHECK(xs[10000] == doctest::Approx(2.0).epsilon(0.03));

  ServiceTime ex{ServiceTime::Family::kExponential};
  ex.mean = 3.0;
  double sum = 0.0;
  for (int i = 0; i < 50000; ++i) sum += sample_service_time(ex, rng);
  CHECK(sum / 50000 == doctest::Approx(3.0).epsilon(0.02));

  ServiceTime bad{ServiceTime::Family::kFixed};
  bad.value = 0.0;
  CHECK_THROWS_AS(check_service_time(bad), Error);
  CHECK(service_family_from_string("lognormal") == ServiceTime::Family::kLognormal);
  CHECK_FALSE(service_family_from_string("gamma").has_value());
}

TEST_CASE("profile checks name the offending field") {
  auto c = klass("crowd", 1.0);
  check_worker_class(c);
  c.retention = 1.5;
  CHECK_THROWS_WITH(check_worker_class(c), doctest::Contains("retention"));
  MachineAgentProfile m;
  m.name = "clf";
  check_machine_profile(m);
  m.capacity = 0;
  CHECK_THROWS_WITH(check_machine_profile(m), doctest::Contains("capacity"));
}

TEST_CASE("agent pool bookkeeping") {
  AgentPoolState pool({klass("expert", 0.03), klass("crowd", 0.04)}, 1.0);
  const auto a = pool.arrive(1);
  const auto b = pool.arrive(1);
  const auto c = pool.arrive(0);
  CHECK(pool.name_of(a) == "crowd#0");
  CHECK(pool.name_of(b) == "crowd#1");
  CHECK(pool.name_of(c) == "expert#0");
  CHECK(pool.pop_available(1) == a);  // FIFO
  pool.start(a, {0, 3, SimTime::from_units(5)});
  CHECK(pool.is_busy(a));
  CHECK_FALSE(pool.is_available(a));
  CHECK(pool.busy_job(a)->microtask == 3);
  CHECK_THROWS_AS(pool.start(a, {}), Error);
  pool.finish(a);
  CHECK(pool.is_available(a));
  CHECK_THROWS_AS(pool.finish(a), Error);
  pool.depart(b);
  CHECK(pool.pop_available(1) == a);
  CHECK_FALSE(pool.pop_available(1).has_value());

  pool.set_incentive(1.25);
  CHECK(pool.effective_arrival_rate(1) == doctest::Approx(0.05));
  pool.set_base_rate(1, 0.0);
  CHECK(pool.effective_arrival_rate(1) == 0.0);
  pool.set_base_rate(1, 0.08);
  CHECK(pool.effective_arrival_rate(1) == doctest::Approx(0.1));
  CHECK(pool.base_arrival_rate(1) == doctest::Approx(0.08));
}

TEST_CASE("property: a worker is never both available and busy") {
  auto rng = seeded_rng(12, "test/pool");
  AgentPoolState pool({klass("a", 1.0), klass("b", 1.0)});
  std::vector<WorkerId> known;
  std::vector<char> gone;
  for (int step = 0; step < 20000; ++step) {
    switch (rng.uniform_below(4)) {
      case 0:
        known.push_back(pool.arrive(static_cast<int>(rng.uniform_below(2))));
        gone.push_back(0);
        break;
      case 1:
        if (auto id = pool.pop_available(static_cast<int>(rng.uniform_below(2)))) {
          pool.start(*id, {0, step, SimTime{}});
        }
        break;
      case 2:
        if (!known.empty()) {
          const auto id = known[rng.uniform_below(known.size())];
          if (pool.is_busy(id)) pool.finish(id);
        }
        break;
      case 3:
        if (!known.empty()) {
          const auto id = known[rng.uniform_below(known.size())];
          pool.depart(id);
          gone[id] = 1;
        }
        break;
    }
    if (step % 97 == 0) {
      for (auto id : known) {
        REQUIRE_FALSE((pool.is_available(id) && pool.is_busy(id)));
        if (gone[id]) REQUIRE_FALSE((pool.is_available(id) || pool.is_busy(id)));
      }
    }
  }
}

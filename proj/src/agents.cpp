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

#include "hmflow/agents.hpp"

#include <algorithm>
#include <cmath>

#include "hmflow/aggregation.hpp"

namespace hmflow {

const char* to_string(ServiceTime::Family f) {
  switch (f) {
    case ServiceTime::Family::kLognormal:
      return "lognormal";
    case ServiceTime::Family::kExponential:
      return "exponential";
    case ServiceTime::Family::kFixed:
      return "fixed";
  }
  return "lognormal";
}

std::optional<ServiceTime::Family> service_family_from_string(
    const std::string& s) {
  if (s == "lognormal") return ServiceTime::Family::kLognormal;
  if (s == "exponential") return ServiceTime::Family::kExponential;
  if (s == "fixed") return ServiceTime::Family::kFixed;
  return std::nullopt;
}

void check_service_time(const ServiceTime& s) {
  switch (s.family) {
    case ServiceTime::Family::kLognormal:
      if (!(s.median > 0.0) || !(s.sigma >= 0.0)) {
        fail(ErrorCode::kInvalidArgument,
             "lognormal service time needs median > 0 and sigma >= 0");
      }
      break;
    case ServiceTime::Family::kExponential:
      if (!(s.mean > 0.0)) {
        fail(ErrorCode::kInvalidArgument,
             "exponential service time needs mean > 0");
      }
      break;
    case ServiceTime::Family::kFixed:
      if (!(s.value > 0.0)) {
        fail(ErrorCode::kInvalidArgument, "fixed service time must be > 0");
      }
      break;
  }
}

double sample_service_time(const ServiceTime& s, RngStream& rng) {
  switch (s.family) {
    case ServiceTime::Family::kLognormal:
      return std::exp(std::log(s.median) + s.sigma * rng.standard_normal());
    case ServiceTime::Family::kExponential:
      return rng.exponential(1.0 / s.mean);
    case ServiceTime::Family::kFixed:
      return s.value;
  }
  return s.value;
}

void check_worker_class(const WorkerClass& c) {
  if (c.name.empty()) fail(ErrorCode::kInvalidArgument, "worker class name");
  if (!(c.accuracy_p >= 0.0 && c.accuracy_p <= 1.0)) {
    fail(ErrorCode::kInvalidArgument, "accuracy must lie in [0, 1]");
  }
  if (!(c.arrival_rate > 0.0)) {
    fail(ErrorCode::kInvalidArgument, "arrival_rate must be > 0");
  }
  if (c.base_reward_accepted.micros < 0) {
    fail(ErrorCode::kInvalidArgument, "base_reward must be >= 0");
  }
  if (!(c.retention >= 0.0 && c.retention <= 1.0)) {
    fail(ErrorCode::kInvalidArgument, "retention must lie in [0, 1]");
  }
  check_service_time(c.service_time);
}

void check_machine_profile(const MachineAgentProfile& m) {
  if (m.name.empty()) fail(ErrorCode::kInvalidArgument, "machine agent name");
  if (!(m.accuracy_p >= 0.0 && m.accuracy_p <= 1.0)) {
    fail(ErrorCode::kInvalidArgument, "accuracy must lie in [0, 1]");
  }
  if (m.service_time_per_item.ticks <= 0) {
    fail(ErrorCode::kInvalidArgument, "service_time must be > 0");
  }
  if (m.cost_per_item.micros < 0) {
    fail(ErrorCode::kInvalidArgument, "cost must be >= 0");
  }
  if (m.capacity < 1) fail(ErrorCode::kInvalidArgument, "capacity must be >= 1");
}

double sample_interarrival(double rate, RngStream& rng) {
  if (!(rate > 0.0)) {
    fail(ErrorCode::kInvalidArgument, "arrival rate must be > 0");
  }
  return rng.exponential(rate);
}

Category answer_microtask(double p, int category_count, Category truth,
                          RngStream& rng) {
  if (category_count < 2) {
    fail(ErrorCode::kInvalidArgument, "answer domain needs >= 2 categories");
  }
  if (truth < 0 || truth >= category_count) {
    fail(ErrorCode::kInvalidArgument, "truth outside the answer domain");
  }
  if (rng.uniform01() < p) return truth;
  const auto k = static_cast<Category>(
      rng.uniform_below(static_cast<std::uint64_t>(category_count - 1)));
  return k < truth ? k : k + 1;
}

double invert_majority_accuracy(double target, int w, int C) {
  if (w < 1 || w % 2 == 0) fail(ErrorCode::kInvalidArgument, "w must be odd");
  if (!(target > 1.0 / C && target < 1.0)) {
    fail(ErrorCode::kInvalidArgument,
         "target majority accuracy is unattainable (must lie in (1/C, 1))");
  }
  double lo = 0.0;
  double hi = 1.0;
  for (int i = 0; i < 200 && hi - lo > 1e-13; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (majority_accuracy_analytic(mid, w, C) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double apply_incentive(double base_rate, double multiplier, double elasticity) {
  if (!(multiplier >= 1.0)) {
    fail(ErrorCode::kInvalidArgument, "incentive multiplier must be >= 1");
  }
  return base_rate * (1.0 + elasticity * (multiplier - 1.0));
}

AgentPoolState::AgentPoolState(const std::vector<WorkerClass>& classes,
                               double elasticity)
    : elasticity_(elasticity) {
  for (const auto& c : classes) {
    class_names_.push_back(c.name);
    base_rate_.push_back(c.arrival_rate);
    effective_rate_.push_back(c.arrival_rate);
  }
  available_.resize(classes.size());
  arrivals_per_class_.assign(classes.size(), 0);
}

WorkerId AgentPoolState::arrive(int worker_class) {
  const WorkerId id = static_cast<WorkerId>(worker_class_.size());
  worker_class_.push_back(worker_class);
  names_.push_back(class_names_.at(worker_class) + "#" +
                   std::to_string(arrivals_per_class_.at(worker_class)++));
  available_flag_.push_back(1);
  available_.at(worker_class).push_back(id);
  return id;
}

void AgentPoolState::start(WorkerId id, BusyWorker job) {
  if (is_busy(id)) fail(ErrorCode::kPrecondition, "worker is already busy");
  if (is_available(id)) {
    auto& q = available_.at(worker_class_.at(id));
    q.erase(std::find(q.begin(), q.end(), id));
    available_flag_[id] = 0;
  }
  busy_.emplace(id, job);
}

void AgentPoolState::finish(WorkerId id) {
  if (busy_.erase(id) == 0) fail(ErrorCode::kPrecondition, "worker not busy");
  push_available(id);
}

void AgentPoolState::push_available(WorkerId id) {
  if (is_busy(id) || is_available(id)) {
    fail(ErrorCode::kPrecondition, "worker already in the pool");
  }
  available_flag_.at(id) = 1;
  available_.at(worker_class_.at(id)).push_back(id);
}

std::optional<WorkerId> AgentPoolState::pop_available(int worker_class) {
  auto& q = available_.at(worker_class);
  if (q.empty()) return std::nullopt;
  const WorkerId id = q.front();
  q.pop_front();
  available_flag_[id] = 0;
  return id;
}

void AgentPoolState::depart(WorkerId id) {
  if (is_available(id)) {
    auto& q = available_.at(worker_class_.at(id));
    q.erase(std::find(q.begin(), q.end(), id));
    available_flag_[id] = 0;
  }
  busy_.erase(id);
}

bool AgentPoolState::is_available(WorkerId id) const {
  return id >= 0 && id < static_cast<WorkerId>(available_flag_.size()) &&
         available_flag_[id] != 0;
}

bool AgentPoolState::is_busy(WorkerId id) const { return busy_.count(id) > 0; }

const BusyWorker* AgentPoolState::busy_job(WorkerId id) const {
  auto it = busy_.find(id);
  return it == busy_.end() ? nullptr : &it->second;
}

void AgentPoolState::set_base_rate(int worker_class, double rate) {
  base_rate_.at(worker_class) = rate;
  effective_rate_.at(worker_class) =
      apply_incentive(rate, incentive_, elasticity_);
}

void AgentPoolState::set_incentive(double multiplier) {
  incentive_ = multiplier;
  for (std::size_t c = 0; c < base_rate_.size(); ++c) {
    effective_rate_[c] = apply_incentive(base_rate_[c], multiplier, elasticity_);
  }
}

}  // namespace hmflow

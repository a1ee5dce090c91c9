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

// Behavioral models of computing agents: crowd-worker classes arriving by a
// Poisson process, and machine agents with fixed per-item throughput.

#ifndef HMFLOW_AGENTS_HPP_
#define HMFLOW_AGENTS_HPP_

#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hmflow/sim.hpp"
#include "hmflow/task.hpp"
#include "hmflow/types.hpp"

namespace hmflow {

struct ServiceTime {
  enum class Family { kLognormal, kExponential, kFixed };
  Family family = Family::kLognormal;
  // Lognormal: median and sigma of log. Exponential: mean. Fixed: value.
  double median = 1.0;
  double sigma = 0.5;
  double mean = 1.0;
  double value = 1.0;

  bool operator==(const ServiceTime&) const = default;
};

const char* to_string(ServiceTime::Family f);
std::optional<ServiceTime::Family> service_family_from_string(
    const std::string& s);

// Throws Error(kInvalidArgument) unless every sample would be positive.
void check_service_time(const ServiceTime& s);

// In scenario time units, > 0.
double sample_service_time(const ServiceTime& s, RngStream& rng);

struct WorkerClass {
  std::string name;
  double accuracy_p = 0.5;
  // When set, accuracy_p was calibrated from this majority accuracy.
  std::optional<double> target_majority_accuracy;
  ServiceTime service_time;
  double arrival_rate = 1.0;  // arrivals per time unit
  Money base_reward_accepted;
  double retention = 0.5;  // chance a finishing worker looks for more work

  bool operator==(const WorkerClass&) const = default;
};

struct MachineAgentProfile {
  std::string name;
  double accuracy_p = 0.5;
  Duration service_time_per_item = Duration::from_units(1.0);
  Money cost_per_item;
  int capacity = 1;

  bool operator==(const MachineAgentProfile&) const = default;
};

void check_worker_class(const WorkerClass& c);
void check_machine_profile(const MachineAgentProfile& m);

// Exponential inter-arrival time (time units) with mean 1/rate. Throws
// Error(kInvalidArgument) for rate <= 0.
double sample_interarrival(double rate, RngStream& rng);

// Returns `truth` with probability p, otherwise a uniformly chosen wrong
// label.
Category answer_microtask(double p, int category_count, Category truth,
                          RngStream& rng);

// Per-worker accuracy p whose w-vote strict-majority accuracy equals
// `target`. Bisection on majority_accuracy_analytic. Throws
// Error(kInvalidArgument) when target is outside (1/C, 1) or w is even.
double invert_majority_accuracy(double target, int w, int C);

// rate * (1 + elasticity * (multiplier - 1)). Throws for multiplier < 1.
double apply_incentive(double base_rate, double multiplier,
                       double elasticity = 1.0);

using WorkerId = int;

struct BusyWorker {
  int node = 0;
  MicrotaskId microtask = 0;
  SimTime finish;
};

// Supply side of the crowd. Worker ids are dense and never reused.
class AgentPoolState {
 public:
  explicit AgentPoolState(const std::vector<WorkerClass>& classes,
                          double elasticity = 1.0);

  WorkerId arrive(int worker_class);
  // Marks a worker busy, taking it off the available queue if needed.
  void start(WorkerId id, BusyWorker job);
  // Moves a busy worker back to the available queue.
  void finish(WorkerId id);
  // Removes an available or busy worker from the pool.
  void depart(WorkerId id);
  std::optional<WorkerId> pop_available(int worker_class);
  void push_available(WorkerId id);

  bool is_available(WorkerId id) const;
  bool is_busy(WorkerId id) const;
  const BusyWorker* busy_job(WorkerId id) const;
  int class_of(WorkerId id) const { return worker_class_.at(id); }
  // "<class>#<k>", stable across runs.
  const std::string& name_of(WorkerId id) const { return names_.at(id); }

  double effective_arrival_rate(int worker_class) const {
    return effective_rate_.at(worker_class);
  }
  double base_arrival_rate(int worker_class) const {
    return base_rate_.at(worker_class);
  }
  // Scripted change of the underlying supply; keeps the current incentive.
  void set_base_rate(int worker_class, double rate);
  // Applies the incentive multiplier to every class.
  void set_incentive(double multiplier);
  double incentive() const { return incentive_; }
  double elasticity() const { return elasticity_; }
  std::size_t class_count() const { return base_rate_.size(); }
  std::size_t busy_count() const { return busy_.size(); }

 private:
  std::vector<std::string> class_names_;
  std::vector<double> base_rate_;
  std::vector<double> effective_rate_;
  std::vector<std::deque<WorkerId>> available_;
  std::map<WorkerId, BusyWorker> busy_;
  std::vector<int> worker_class_;
  std::vector<std::string> names_;
  std::vector<int> arrivals_per_class_;
  std::vector<char> available_flag_;
  double elasticity_;
  double incentive_ = 1.0;
};

}  // namespace hmflow

#endif  // HMFLOW_AGENTS_HPP_

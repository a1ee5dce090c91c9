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

// Discrete-event kernel: integer clock, FIFO tie-breaking among simultaneous
// events, and labeled random streams that reproduce bit-for-bit everywhere.

#ifndef HMFLOW_SIM_HPP_
#define HMFLOW_SIM_HPP_

#include <cstdint>
#include <optional>
#include <queue>
#include <random>
#include <string_view>
#include <unordered_set>
#include <variant>
#include <vector>

#include "hmflow/task.hpp"
#include "hmflow/types.hpp"

namespace hmflow {

// mt19937_64 is fully specified by the standard; the transforms below avoid
// the implementation-defined <random> distributions.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  // Uniform on [0, 1) with 53 bits of precision.
  double uniform01();
  // Uniform on {0, ..., n-1}; unbiased.
  std::uint64_t uniform_below(std::uint64_t n);
  double exponential(double rate);
  double standard_normal();

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_normal_;
};

// Independent stream for a (seed, label) pair.
RngStream seeded_rng(std::uint64_t seed, std::string_view stream_label);

enum class EventKind {
  kWorkerArrival,
  kAssignmentReturn,
  kAssignmentTimeout,
  kPollTick,
  kMachineBatchDone,
  kScenarioScript,
};

const char* to_string(EventKind k);

struct WorkerArrivalPayload {
  int worker_class = 0;
};
struct AssignmentReturnPayload {
  int node = 0;
  MicrotaskId microtask = 0;
  int worker = 0;
};
struct AssignmentTimeoutPayload {
  int node = 0;
  MicrotaskId microtask = 0;
};
struct PollTickPayload {
  int node = 0;
  int poll_index = 0;
};
struct MachineBatchDonePayload {
  int batch = 0;
};
struct ScenarioScriptPayload {
  int script_index = 0;
};

using EventPayload =
    std::variant<WorkerArrivalPayload, AssignmentReturnPayload,
                 AssignmentTimeoutPayload, PollTickPayload,
                 MachineBatchDonePayload, ScenarioScriptPayload>;

using EventId = std::uint64_t;

struct SimEvent {
  SimTime fire_at;
  EventId sequence = 0;
  EventKind kind = EventKind::kPollTick;
  EventPayload payload;
};

struct EventCounts {
  std::uint64_t scheduled = 0;
  std::uint64_t fired = 0;
  std::uint64_t cancelled = 0;
  std::uint64_t past_horizon = 0;
};

class Simulator {
 public:
  explicit Simulator(SimTime horizon);

  SimTime now() const { return now_; }
  SimTime horizon() const { return horizon_; }

  // Throws Error(kPrecondition) when `at` precedes the clock.
  EventId schedule(SimTime at, EventPayload payload);
  void cancel(EventId id);

  // True when a live event remains at or before the horizon.
  bool has_next();
  // Pops the next live event and advances the clock to it. Throws
  // Error(kPrecondition) if nothing is left or the next event lies past the
  // horizon; check has_next() first.
  SimEvent step();

  // Cancels every live event at or before the horizon and tallies the rest
  // as past-horizon. Call once when the run ends.
  void finish();
  // Number of live events in the queue (cancelled ones excluded).
  std::size_t pending() const { return live_.size(); }
  const EventCounts& counts() const { return counts_; }

 private:
  struct Later {
    bool operator()(const SimEvent& a, const SimEvent& b) const {
      if (a.fire_at != b.fire_at) return a.fire_at > b.fire_at;
      return a.sequence > b.sequence;
    }
  };
  void drop_cancelled_top();

  SimTime now_;
  SimTime horizon_;
  EventId next_sequence_ = 0;
  std::priority_queue<SimEvent, std::vector<SimEvent>, Later> queue_;
  std::unordered_set<EventId> cancelled_;
  std::unordered_set<EventId> live_;
  EventCounts counts_;
};

EventKind kind_of(const EventPayload& p);

}  // namespace hmflow

#endif  // HMFLOW_SIM_HPP_

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

#include "hmflow/sim.hpp"

#include <cmath>
#include <numbers>

namespace hmflow {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

double RngStream::uniform01() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t RngStream::uniform_below(std::uint64_t n) {
  if (n == 0) fail(ErrorCode::kInvalidArgument, "uniform_below(0)");
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

double RngStream::exponential(double rate) {
  if (!(rate > 0.0)) fail(ErrorCode::kInvalidArgument, "rate must be > 0");
  // 1 - u lies in (0, 1], so the log is finite.
  return -std::log1p(-uniform01()) / rate;
}

double RngStream::standard_normal() {
  if (spare_normal_) {
    const double z = *spare_normal_;
    spare_normal_.reset();
    return z;
  }
  const double u1 = 1.0 - uniform01();
  const double u2 = uniform01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_normal_ = r * std::sin(theta);
  return r * std::cos(theta);
}

RngStream seeded_rng(std::uint64_t seed, std::string_view stream_label) {
  return RngStream(splitmix64(splitmix64(seed) ^ fnv1a(stream_label)));
}

const char* to_string(EventKind k) {
  switch (k) {
    case EventKind::kWorkerArrival:
      return "worker_arrival";
    case EventKind::kAssignmentReturn:
      return "assignment_return";
    case EventKind::kAssignmentTimeout:
      return "assignment_timeout";
    case EventKind::kPollTick:
      return "poll_tick";
    case EventKind::kMachineBatchDone:
      return "machine_batch_done";
    case EventKind::kScenarioScript:
      return "scenario_script";
  }
  return "unknown";
}

EventKind kind_of(const EventPayload& p) {
  return static_cast<EventKind>(p.index());
}

Simulator::Simulator(SimTime horizon) : horizon_(horizon) {}

EventId Simulator::schedule(SimTime at, EventPayload payload) {
  if (at < now_) {
    fail(ErrorCode::kPrecondition, "cannot schedule an event in the past");
  }
  SimEvent e;
  e.fire_at = at;
  e.sequence = next_sequence_++;
  e.kind = kind_of(payload);
  e.payload = std::move(payload);
  live_.insert(e.sequence);
  queue_.push(std::move(e));
  ++counts_.scheduled;
  return next_sequence_ - 1;
}

void Simulator::cancel(EventId id) {
  if (live_.erase(id)) {
    cancelled_.insert(id);
    ++counts_.cancelled;
  }
}

void Simulator::drop_cancelled_top() {
  while (!queue_.empty()) {
    auto it = cancelled_.find(queue_.top().sequence);
    if (it == cancelled_.end()) return;
    cancelled_.erase(it);
    queue_.pop();
  }
}

bool Simulator::has_next() {
  drop_cancelled_top();
  return !queue_.empty() && queue_.top().fire_at <= horizon_;
}

SimEvent Simulator::step() {
  drop_cancelled_top();
  if (queue_.empty()) fail(ErrorCode::kPrecondition, "event queue is empty");
  if (queue_.top().fire_at > horizon_) {
    fail(ErrorCode::kPrecondition, "next event lies past the horizon");
  }
  SimEvent e = queue_.top();
  queue_.pop();
  live_.erase(e.sequence);
  now_ = e.fire_at;
  ++counts_.fired;
  return e;
}

void Simulator::finish() {
  while (!queue_.empty()) {
    const SimEvent& e = queue_.top();
    if (!cancelled_.erase(e.sequence)) {
      if (e.fire_at <= horizon_) {
        ++counts_.cancelled;
      } else {
        ++counts_.past_horizon;
      }
    }
    queue_.pop();
  }
  cancelled_.clear();
  live_.clear();
}

}  // namespace hmflow

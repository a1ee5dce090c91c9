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

#ifndef HMFLOW_TYPES_HPP_
#define HMFLOW_TYPES_HPP_

#include <cmath>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace hmflow {

// Simulated time is kept on an integer grid. One scenario time unit (minute,
// second, ... as declared by the scenario) is kTicksPerUnit ticks.
inline constexpr std::int64_t kTicksPerUnit = 1'000'000;

// Money is kept in millionths of a currency unit so that budget comparisons
// are exact.
inline constexpr std::int64_t kMicrosPerCurrency = 1'000'000;

// Rounds half-up onto the integer grid.
inline std::int64_t round_half_up(double x) {
  return static_cast<std::int64_t>(std::floor(x + 0.5));
}

struct Duration {
  std::int64_t ticks = 0;

  static constexpr Duration from_ticks(std::int64_t t) { return Duration{t}; }
  static Duration from_units(double units) {
    return Duration{round_half_up(units * static_cast<double>(kTicksPerUnit))};
  }
  double units() const {
    return static_cast<double>(ticks) / static_cast<double>(kTicksPerUnit);
  }
  auto operator<=>(const Duration&) const = default;
  Duration operator+(Duration o) const { return Duration{ticks + o.ticks}; }
  Duration operator-(Duration o) const { return Duration{ticks - o.ticks}; }
};

struct SimTime {
  std::int64_t ticks = 0;

  static constexpr SimTime from_ticks(std::int64_t t) { return SimTime{t}; }
  static SimTime from_units(double units) {
    return SimTime{round_half_up(units * static_cast<double>(kTicksPerUnit))};
  }
  double units() const {
    return static_cast<double>(ticks) / static_cast<double>(kTicksPerUnit);
  }
  auto operator<=>(const SimTime&) const = default;
  SimTime operator+(Duration d) const { return SimTime{ticks + d.ticks}; }
  Duration operator-(SimTime o) const { return Duration{ticks - o.ticks}; }
};

struct Money {
  std::int64_t micros = 0;

  static constexpr Money from_micros(std::int64_t m) { return Money{m}; }
  static Money from_currency(double c) {
    return Money{round_half_up(c * static_cast<double>(kMicrosPerCurrency))};
  }
  double currency() const {
    return static_cast<double>(micros) / static_cast<double>(kMicrosPerCurrency);
  }
  auto operator<=>(const Money&) const = default;
  Money operator+(Money o) const { return Money{micros + o.micros}; }
  Money operator-(Money o) const { return Money{micros - o.micros}; }
  Money& operator+=(Money o) {
    micros += o.micros;
    return *this;
  }
  Money& operator-=(Money o) {
    micros -= o.micros;
    return *this;
  }
};

inline Money operator*(std::int64_t k, Money m) { return Money{k * m.micros}; }

// Error categories. The numeric values are part of the C API.
enum class ErrorCode : int {
  kOk = 0,
  kInvalidArgument = 1,
  kPrecondition = 2,
  kNotFound = 3,
  kParse = 4,
  kValidation = 5,
  kIo = 6,
  kInternal = 7,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace hmflow

#endif  // HMFLOW_TYPES_HPP_

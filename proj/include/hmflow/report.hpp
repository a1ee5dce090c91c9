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

// Report tables derived from a trace. Column order is stable; money is in
// currency units and times in scenario time units.
//
//   classes       per worker class: accuracy, turnaround, spend
//   machines      per machine agent
//   nodes         per node: completion, consensus, spend, SLO verdicts
//   arrivals      per worker class: inter-arrival count, mean, CV
//   histogram     per worker class: 20 inter-arrival bins over [0, 5 * mean)
//   series        one row per poll: lambda, rho, progress, risks
//   actions       controller actions in order

#ifndef HMFLOW_REPORT_HPP_
#define HMFLOW_REPORT_HPP_

#include <optional>
#include <string>
#include <vector>

#include "hmflow/summary.hpp"

namespace hmflow {

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

enum class ReportFormat { kTable, kCsv };

std::optional<ReportFormat> report_format_from_string(const std::string& s);

struct ArrivalStats {
  std::size_t count = 0;
  double mean = 0.0;
  double cv = 0.0;  // standard deviation / mean
};

// Sample mean and coefficient of variation; zeros for fewer than two gaps.
ArrivalStats interarrival_stats(const std::vector<double>& gaps);

// Counts of gaps falling in `bins` equal bins over [0, upper); gaps at or
// beyond `upper` are dropped.
std::vector<int> histogram(const std::vector<double>& gaps, int bins,
                           double upper);

// Inter-arrival gaps (time units) per worker class, in declaration order.
std::vector<std::vector<double>> interarrival_gaps(const Trace& trace);

std::vector<Table> build_report(const Trace& trace);
std::vector<Table> build_report(const Trace& trace, const Summary& summary);

std::string render(const Table& table, ReportFormat format);

}  // namespace hmflow

#endif  // HMFLOW_REPORT_HPP_

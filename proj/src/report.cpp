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

#include "hmflow/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "hmflow/scenario.hpp"

namespace hmflow {

using nlohmann::json;

std::optional<ReportFormat> report_format_from_string(const std::string& s) {
  if (s == "table") return ReportFormat::kTable;
  if (s == "csv") return ReportFormat::kCsv;
  return std::nullopt;
}

ArrivalStats interarrival_stats(const std::vector<double>& gaps) {
  ArrivalStats st;
  st.count = gaps.size();
  if (gaps.size() < 2) return st;
  double sum = 0.0;
  for (double g : gaps) sum += g;
  st.mean = sum / static_cast<double>(gaps.size());
  double sq = 0.0;
  for (double g : gaps) sq += (g - st.mean) * (g - st.mean);
  const double sd = std::sqrt(sq / static_cast<double>(gaps.size() - 1));
  st.cv = st.mean > 0.0 ? sd / st.mean : 0.0;
  return st;
}

std::vector<int> histogram(const std::vector<double>& gaps, int bins,
                           double upper) {
  if (bins < 1) fail(ErrorCode::kInvalidArgument, "bins must be >= 1");
  std::vector<int> out(bins, 0);
  if (!(upper > 0.0)) return out;
  for (double g : gaps) {
    if (g < 0.0 || g >= upper) continue;
    const int b = std::min(bins - 1, static_cast<int>(g / upper * bins));
    ++out[b];
  }
  return out;
}

std::vector<std::vector<double>> interarrival_gaps(const Trace& trace) {
  std::vector<std::string> names;
  if (trace.header.contains("config")) {
    for (const auto& c : trace.header["config"].value("worker_classes", json::array())) {
      names.push_back(c.value("name", ""));
    }
  }
  std::vector<std::vector<double>> out(names.size());
  std::vector<std::optional<std::int64_t>> last(names.size());
  for (const auto& r : trace.records) {
    if (r.at("kind") != "arrival") continue;
    const auto it = std::find(names.begin(), names.end(), r.at("class"));
    if (it == names.end()) continue;
    const auto c = static_cast<std::size_t>(it - names.begin());
    const auto t = r.at("t").get<std::int64_t>();
    if (last[c]) {
      out[c].push_back(static_cast<double>(t - *last[c]) / kTicksPerUnit);
    }
    last[c] = t;
  }
  return out;
}

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string money(Money m) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", m.currency());
  return buf;
}

std::string yes_no(bool b) { return b ? "met" : "missed"; }

}  // namespace

std::vector<Table> build_report(const Trace& trace) {
  return build_report(trace, summarize_trace(trace));
}

std::vector<Table> build_report(const Trace& trace, const Summary& s) {
  std::vector<Table> out;

  Table classes{"classes",
                {"class", "accuracy_p", "predicted_majority", "arrivals",
                 "issued", "returned", "timed_out", "answer_accuracy",
                 "mean_turnaround", "spent"},
                {}};
  for (const auto& c : s.classes) {
    classes.rows.push_back({c.name, num(c.accuracy_p), num(c.predicted_majority),
                            std::to_string(c.arrivals), std::to_string(c.issued),
                            std::to_string(c.returned), std::to_string(c.timed_out),
                            num(c.answer_accuracy), num(c.mean_turnaround),
                            money(c.spent)});
  }
  out.push_back(std::move(classes));

  Table machines{"machines",
                 {"agent", "batches", "items", "accuracy", "spent"},
                 {}};
  for (const auto& m : s.machines) {
    machines.rows.push_back({m.name, std::to_string(m.batches),
                             std::to_string(m.items), num(m.accuracy),
                             money(m.spent)});
  }
  out.push_back(std::move(machines));

  Table nodes{"nodes",
              {"node", "n", "evaluated", "by_human", "by_machine", "rerouted",
               "completion", "consensus_rate", "accuracy", "spent", "budget",
               "start", "finish", "deadline", "final_lambda", "slo_accuracy",
               "slo_budget", "slo_deadline"},
              {}};
  auto node_row = [&](const std::string& id, int n, int ev, int h, int m,
                      int rr, double comp, double cr, double acc, Money spent,
                      Money budget, double start, double finish, double deadline,
                      const std::string& lambda, const SloVerdicts& v) {
    nodes.rows.push_back({id, std::to_string(n), std::to_string(ev),
                          std::to_string(h), std::to_string(m), std::to_string(rr),
                          num(comp), num(cr), num(acc), money(spent), money(budget),
                          num(start), num(finish), num(deadline), lambda,
                          yes_no(v.accuracy.met), yes_no(v.budget.met),
                          yes_no(v.deadline.met)});
  };
  int h = 0, m = 0, rr = 0;
  for (const auto& n : s.nodes) {
    node_row(n.id, n.n, n.evaluated, n.evaluated_by_human, n.evaluated_by_machine,
             n.rerouted, n.completion, n.consensus_rate, n.accuracy, n.spent,
             n.budget, n.start.units(), n.finish.units(), n.deadline.units(),
             num(n.final_lambda), n.slo);
    h += n.evaluated_by_human;
    m += n.evaluated_by_machine;
    rr += n.rerouted;
  }
  if (!s.nodes.empty()) {
    node_row("(task)", s.n, s.evaluated, h, m, rr, s.completion, s.consensus_rate,
             s.accuracy, s.spent, s.budget, 0.0, s.finish.units(),
             s.deadline.units(), "", s.slo);
  }
  out.push_back(std::move(nodes));

  const auto gaps = interarrival_gaps(trace);
  Table arrivals{"arrivals", {"class", "gaps", "mean", "cv"}, {}};
  Table hist{"histogram", {"class", "bin", "lower", "upper", "count"}, {}};
  for (std::size_t c = 0; c < gaps.size() && c < s.classes.size(); ++c) {
    const auto st = interarrival_stats(gaps[c]);
    arrivals.rows.push_back({s.classes[c].name, std::to_string(st.count),
                             num(st.mean), num(st.cv)});
    if (st.count < 2) continue;
    constexpr int kBins = 20;
    const double upper = 5.0 * st.mean;
    const auto counts = histogram(gaps[c], kBins, upper);
    for (int b = 0; b < kBins; ++b) {
      hist.rows.push_back({s.classes[c].name, std::to_string(b),
                           num(upper * b / kBins), num(upper * (b + 1) / kBins),
                           std::to_string(counts[b])});
    }
  }
  out.push_back(std::move(arrivals));
  out.push_back(std::move(hist));

  Table series{"series",
               {"t", "node", "poll", "lambda", "rho", "evaluated", "total",
                "consensus_rate", "incentive", "headroom", "risks"},
               {}};
  for (const auto& r : trace.records) {
    if (r.at("kind") != "poll") continue;
    std::string risks;
    for (const auto& f : r.at("risks")) {
      if (!risks.empty()) risks += ';';
      risks += f.get<std::string>();
    }
    series.rows.push_back(
        {num(static_cast<double>(r.at("t").get<std::int64_t>()) / kTicksPerUnit),
         r.at("node").get<std::string>(), std::to_string(r.at("index").get<int>()),
         num(r.at("lambda").get<double>()), num(r.at("rho").get<double>()),
         std::to_string(r.at("evaluated").get<int>()),
         std::to_string(r.at("total").get<int>()),
         num(r.at("consensus_rate").get<double>()),
         num(r.at("incentive").get<double>()),
         money(Money{r.at("headroom").get<std::int64_t>()}), risks});
  }
  out.push_back(std::move(series));

  Table actions{"actions", {"t", "node", "action", "trigger", "detail"}, {}};
  for (const auto& a : s.actions) {
    actions.rows.push_back({num(a.at.units()), a.node, a.action, a.trigger, a.detail});
  }
  out.push_back(std::move(actions));
  return out;
}

namespace {

std::string csv_field(const std::string& f) {
  if (f.find_first_of(",\"\n") == std::string::npos) return f;
  std::string out = "\"";
  for (char c : f) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string render(const Table& table, ReportFormat format) {
  std::string out;
  if (format == ReportFormat::kCsv) {
    auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out += ',';
        out += csv_field(cells[i]);
      }
      out += '\n';
    };
    line(table.columns);
    for (const auto& r : table.rows) line(r);
    return out;
  }
  std::vector<std::size_t> width(table.columns.size());
  for (std::size_t i = 0; i < width.size(); ++i) width[i] = table.columns[i].size();
  for (const auto& r : table.rows) {
    for (std::size_t i = 0; i < r.size() && i < width.size(); ++i) {
      width[i] = std::max(width[i], r[i].size());
    }
  }
  auto line = [&](const std::vector<std::string>& cells) {
    std::string l;
    for (std::size_t i = 0; i < width.size(); ++i) {
      const std::string cell = i < cells.size() ? cells[i] : "";
      l += cell;
      if (i + 1 < width.size()) l += std::string(width[i] - cell.size() + 2, ' ');
    }
    while (!l.empty() && l.back() == ' ') l.pop_back();
    out += l + '\n';
  };
  out += "== " + table.name + " ==\n";
  line(table.columns);
  for (const auto& r : table.rows) line(r);
  return out;
}

}  // namespace hmflow

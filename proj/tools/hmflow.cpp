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

// hmflow command-line runner. Talks to the library only through the C API.
//
//   hmflow validate <scenario>
//   hmflow run <scenario> [--seed N] [--out DIR] [--set key=value]...
//   hmflow report <trace> [--format table|csv] [--out DIR]
//   hmflow sweep <scenario> --param NAME --values V1,V2,... [--jobs N]
//
// Output directories default to $HMFLOW_OUT_DIR, then "hmflow-out".
// Exit status: 0 when the command completed (SLO misses included), 2 for
// invalid input, 3 for I/O errors, 4 for internal errors.

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "hmflow/hmflow.h"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitIo = 3;
constexpr int kExitInternal = 4;

int exit_code(hmf_status s) {
  switch (s) {
    case HMF_OK:
      return 0;
    case HMF_E_IO:
      return kExitIo;
    case HMF_E_INTERNAL:
      return kExitInternal;
    default:
      return kExitInput;
  }
}

struct ScenarioDeleter {
  void operator()(hmf_scenario* s) const { hmf_scenario_free(s); }
};
struct RunDeleter {
  void operator()(hmf_run* r) const { hmf_run_free(r); }
};
using ScenarioPtr = std::unique_ptr<hmf_scenario, ScenarioDeleter>;
using RunPtr = std::unique_ptr<hmf_run, RunDeleter>;

// Thrown to unwind with a status after printing the library message.
struct Failure {
  hmf_status status;
};

void check(hmf_status s, const std::string& context) {
  if (s == HMF_OK) return;
  std::cerr << "hmflow: " << context << ": " << hmf_last_error();
  const std::string msg = hmf_last_error();
  if (msg.empty() || msg.back() != '\n') std::cerr << "\n";
  throw Failure{s};
}

std::string take(char* s) {
  std::string out = s ? s : "";
  hmf_string_free(s);
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "hmflow: cannot open '" << path << "'\n";
    throw Failure{HMF_E_IO};
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) {
    std::cerr << "hmflow: cannot write '" << path.string() << "'\n";
    throw Failure{HMF_E_IO};
  }
}

fs::path out_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("HMFLOW_OUT_DIR"); env && *env) return env;
  return "hmflow-out";
}

ScenarioPtr load(const std::string& path) {
  hmf_scenario* s = nullptr;
  check(hmf_scenario_load(path.c_str(), &s), path);
  return ScenarioPtr(s);
}

void apply_sets(hmf_scenario* s, const std::vector<std::string>& sets) {
  for (const auto& kv : sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) {
      std::cerr << "hmflow: --set expects key=value, got '" << kv << "'\n";
      throw Failure{HMF_E_INVALID_ARGUMENT};
    }
    check(hmf_scenario_override(s, kv.substr(0, eq).c_str(),
                                kv.substr(eq + 1).c_str()),
          "--set " + kv);
  }
}

// Short names accepted by `sweep --param`.
std::string param_path(const std::string& p) {
  if (p == "lambda") return "controller.initial_lambda";
  if (p == "w") return "controller.replication_w";
  if (p == "K") return "controller.K";
  return p;
}

std::string verdict(const json& v) {
  return v.at("met").get<bool>() ? "met" : "missed";
}

void print_summary(const json& s, std::ostream& os) {
  char line[256];
  std::snprintf(line, sizeof line,
                "%s seed=%llu: evaluated %d/%d (%.2f%%), consensus %.4f, "
                "spent %.6f of %.6f, finish %g of %g\n",
                s.at("scenario").get<std::string>().c_str(),
                static_cast<unsigned long long>(s.at("seed").get<std::uint64_t>()),
                s.at("evaluated").get<int>(), s.at("n").get<int>(),
                100.0 * s.at("completion").get<double>(),
                s.at("consensus_rate").get<double>(), s.at("spent").get<double>(),
                s.at("budget").get<double>(), s.at("finish").get<double>(),
                s.at("deadline").get<double>());
  os << line;
  const auto& slo = s.at("slo");
  os << "  slo: accuracy " << verdict(slo.at("accuracy")) << ", budget "
     << verdict(slo.at("budget")) << ", deadline " << verdict(slo.at("deadline"))
     << "\n";
  os << "  actions: " << s.at("actions").size() << "\n";
}

int cmd_validate(const std::string& path) {
  auto s = load(path);
  std::cout << path << ": ok (" << take([&] {
    char* name = nullptr;
    check(hmf_scenario_name(s.get(), &name), path);
    return name;
  }()) << ")\n";
  return 0;
}

int cmd_run(const std::string& path, const std::string& seed,
            const std::vector<std::string>& sets, const std::string& out) {
  auto s = load(path);
  if (!seed.empty()) check(hmf_scenario_override(s.get(), "seed", seed.c_str()), "--seed");
  apply_sets(s.get(), sets);
  hmf_run* r = nullptr;
  check(hmf_run_execute(s.get(), 1, &r), "run");
  RunPtr run(r);
  char* buf = nullptr;
  check(hmf_run_trace(run.get(), &buf), "trace");
  const std::string trace = take(buf);
  check(hmf_run_summary_json(run.get(), &buf), "summary");
  const std::string summary = take(buf);
  const fs::path dir = out_dir(out);
  write_file(dir / "trace.ndjson", trace);
  write_file(dir / "summary.json", summary);
  print_summary(json::parse(summary), std::cout);
  std::cout << "  wrote " << (dir / "trace.ndjson").string() << " and "
            << (dir / "summary.json").string() << "\n";
  return 0;
}

int cmd_report(const std::string& path, const std::string& format,
               const std::string& out) {
  const std::string trace = read_file(path);
  char* buf = nullptr;
  check(hmf_report_render(trace.data(), trace.size(), format.c_str(), &buf),
        path);
  const json tables = json::parse(take(buf));
  const bool to_files = !out.empty();
  const fs::path dir = out;
  for (const auto& name : tables.at("order")) {
    const std::string text = tables.at(name.get<std::string>()).get<std::string>();
    if (to_files) {
      write_file(dir / (name.get<std::string>() + (format == "csv" ? ".csv" : ".txt")),
                 text);
    } else {
      if (format == "csv") std::cout << "# " << name.get<std::string>() << "\n";
      std::cout << text << "\n";
    }
  }
  if (to_files) std::cout << "wrote report tables to " << dir.string() << "\n";
  return 0;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string part;
  std::stringstream ss(s);
  while (std::getline(ss, part, sep)) {
    if (!part.empty()) out.push_back(part);
  }
  return out;
}

int cmd_sweep(const std::string& path, const std::string& param,
              const std::string& values, const std::vector<std::string>& sets,
              unsigned jobs, const std::string& out) {
  auto base = load(path);
  apply_sets(base.get(), sets);
  const auto vals = split(values, ',');
  if (vals.empty()) {
    std::cerr << "hmflow: --values needs at least one value\n";
    return kExitInput;
  }
  const std::string key = param_path(param);
  // Configure every run up front so bad values fail before any work starts.
  std::vector<ScenarioPtr> runs;
  for (const auto& v : vals) {
    hmf_scenario* s = nullptr;
    check(hmf_scenario_clone(base.get(), &s), "clone");
    runs.emplace_back(s);
    check(hmf_scenario_override(s, key.c_str(), v.c_str()), key + "=" + v);
  }
  const fs::path dir = out_dir(out);
  std::vector<std::string> summaries(vals.size());
  std::vector<std::string> errors(vals.size());
  std::vector<hmf_status> status(vals.size(), HMF_OK);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < vals.size(); i = next++) {
      hmf_run* r = nullptr;
      status[i] = hmf_run_execute(runs[i].get(), 1, &r);
      if (status[i] != HMF_OK) {
        errors[i] = hmf_last_error();
        continue;
      }
      RunPtr run(r);
      char* buf = nullptr;
      hmf_run_trace(run.get(), &buf);
      const std::string trace = take(buf);
      hmf_run_summary_json(run.get(), &buf);
      summaries[i] = take(buf);
      const fs::path sub = dir / (param + "=" + vals[i]);
      std::error_code ec;
      fs::create_directories(sub, ec);
      std::ofstream(sub / "trace.ndjson", std::ios::binary) << trace;
      std::ofstream(sub / "summary.json", std::ios::binary) << summaries[i];
    }
  };
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min<unsigned>(jobs, static_cast<unsigned>(vals.size()));
  std::vector<std::thread> pool;
  for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  std::cout << param << ",completion,consensus_rate,accuracy,spent,finish,"
                        "slo_accuracy,slo_budget,slo_deadline\n";
  int rc = 0;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    if (status[i] != HMF_OK) {
      std::cerr << "hmflow: " << key << "=" << vals[i] << ": " << errors[i] << "\n";
      rc = std::max(rc, exit_code(status[i]));
      continue;
    }
    const json s = json::parse(summaries[i]);
    const auto& slo = s.at("slo");
    std::cout << vals[i] << "," << s.at("completion").dump() << ","
              << s.at("consensus_rate").dump() << "," << s.at("accuracy").dump()
              << "," << s.at("spent").dump() << "," << s.at("finish").dump() << ","
              << verdict(slo.at("accuracy")) << "," << verdict(slo.at("budget"))
              << "," << verdict(slo.at("deadline")) << "\n";
  }
  std::cout << "# per-run outputs under " << dir.string() << "\n";
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hmflow: simulate SLO-driven hybrid human/machine workflows"};
  app.require_subcommand(1);
  app.set_version_flag("--version", hmf_version());

  std::string scenario, trace, seed, out, format = "table", param, values;
  std::vector<std::string> sets;
  unsigned jobs = 0;

  auto* validate = app.add_subcommand("validate", "check a scenario file");
  validate->add_option("scenario", scenario, "scenario file")->required();

  auto* run = app.add_subcommand("run", "run a scenario and write its trace");
  run->add_option("scenario", scenario, "scenario file")->required();
  run->add_option("--seed", seed, "override the scenario seed");
  run->add_option("--out", out, "output directory (default $HMFLOW_OUT_DIR)");
  run->add_option("--set", sets, "override a scalar field, key=value");

  auto* report = app.add_subcommand("report", "render report tables from a trace");
  report->add_option("trace", trace, "NDJSON trace file")->required();
  report->add_option("--format", format, "table or csv")
      ->check(CLI::IsMember({"table", "csv"}));
  report->add_option("--out", out, "write one file per table here");

  auto* sweep = app.add_subcommand("sweep", "run one scenario over several values");
  sweep->add_option("scenario", scenario, "scenario file")->required();
  sweep->add_option("--param", param,
                    "lambda, w, K or any dotted scalar path")->required();
  sweep->add_option("--values", values, "comma-separated values")->required();
  sweep->add_option("--set", sets, "override a scalar field, key=value");
  sweep->add_option("--jobs", jobs, "parallel runs (default: hardware threads)");
  sweep->add_option("--out", out, "output directory (default $HMFLOW_OUT_DIR)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*validate) return cmd_validate(scenario);
    if (*run) return cmd_run(scenario, seed, sets, out);
    if (*report) return cmd_report(trace, format, out);
    if (*sweep) return cmd_sweep(scenario, param, values, sets, jobs, out);
  } catch (const Failure& f) {
    return exit_code(f.status);
  } catch (const std::exception& e) {
    std::cerr << "hmflow: " << e.what() << "\n";
    return kExitInternal;
  }
  return 0;
}

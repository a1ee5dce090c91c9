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

#include "hmflow/scenario.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace hmflow {

using nlohmann::json;

const char* to_string(ScriptEntry::Op op) {
  switch (op) {
    case ScriptEntry::Op::kSetArrivalRate:
      return "set_arrival_rate";
    case ScriptEntry::Op::kSetLambda:
      return "set_lambda";
    case ScriptEntry::Op::kSetIncentive:
      return "set_incentive";
  }
  return "set_arrival_rate";
}

std::string LoadResult::describe() const {
  std::string out;
  for (const auto& i : issues) {
    out += i.location + ": " + i.message + "\n";
  }
  return out;
}

namespace {

// Collects issues while walking the document; every getter falls back to a
// default so that one pass reports as many problems as possible.
class Reader {
 public:
  explicit Reader(std::vector<ScenarioIssue>& issues) : issues_(issues) {}

  void issue(const std::string& where, const std::string& what) {
    issues_.push_back({where.empty() ? "/" : where, what});
  }

  const json* member(const json& obj, const std::string& path,
                     const char* key, bool required) {
    if (!obj.is_object()) return nullptr;
    auto it = obj.find(key);
    if (it == obj.end()) {
      if (required) issue(path + "/" + key, "required field is missing");
      return nullptr;
    }
    return &*it;
  }

  double number(const json& obj, const std::string& path, const char* key,
                std::optional<double> fallback) {
    const json* v = member(obj, path, key, !fallback.has_value());
    if (!v) return fallback.value_or(0.0);
    if (!v->is_number()) {
      issue(path + "/" + key, "expected a number");
      return fallback.value_or(0.0);
    }
    return v->get<double>();
  }

  std::int64_t integer(const json& obj, const std::string& path,
                       const char* key, std::optional<std::int64_t> fallback) {
    const json* v = member(obj, path, key, !fallback.has_value());
    if (!v) return fallback.value_or(0);
    if (!v->is_number_integer()) {
      issue(path + "/" + key, "expected an integer");
      return fallback.value_or(0);
    }
    return v->get<std::int64_t>();
  }

  std::string string(const json& obj, const std::string& path,
                     const char* key, std::optional<std::string> fallback) {
    const json* v = member(obj, path, key, !fallback.has_value());
    if (!v) return fallback.value_or("");
    if (!v->is_string()) {
      issue(path + "/" + key, "expected a string");
      return fallback.value_or("");
    }
    return v->get<std::string>();
  }

  bool boolean(const json& obj, const std::string& path, const char* key,
               bool fallback) {
    const json* v = member(obj, path, key, false);
    if (!v) return fallback;
    if (!v->is_boolean()) {
      issue(path + "/" + key, "expected true or false");
      return fallback;
    }
    return v->get<bool>();
  }

  std::vector<std::string> strings(const json& obj, const std::string& path,
                                   const char* key) {
    std::vector<std::string> out;
    const json* v = member(obj, path, key, false);
    if (!v) return out;
    if (!v->is_array()) {
      issue(path + "/" + key, "expected an array of strings");
      return out;
    }
    for (std::size_t i = 0; i < v->size(); ++i) {
      if (!(*v)[i].is_string()) {
        issue(path + "/" + key + "/" + std::to_string(i), "expected a string");
        continue;
      }
      out.push_back((*v)[i].get<std::string>());
    }
    return out;
  }

  // Runs a model-level check and records its message at `path`.
  template <typename F>
  void check(const std::string& path, F&& f) {
    try {
      f();
    } catch (const Error& e) {
      issue(path, e.what());
    }
  }

 private:
  std::vector<ScenarioIssue>& issues_;
};

SloSpec read_slo(Reader& r, const json& j, const std::string& path) {
  SloSpec s;
  if (!j.is_object()) {
    r.issue(path, "expected an object");
    return s;
  }
  s.accuracy_target = r.number(j, path, "accuracy", std::nullopt);
  s.budget = Money::from_currency(r.number(j, path, "budget", std::nullopt));
  s.deadline = SimTime::from_units(r.number(j, path, "deadline", std::nullopt));
  if (!(s.accuracy_target > 0.0 && s.accuracy_target <= 1.0)) {
    r.issue(path + "/accuracy", "must lie in (0, 1]");
  }
  if (s.budget.micros <= 0) r.issue(path + "/budget", "must be > 0");
  if (s.deadline.ticks <= 0) r.issue(path + "/deadline", "must be > 0");
  return s;
}

json slo_to_json(const SloSpec& s) {
  return {{"accuracy", s.accuracy_target},
          {"budget", s.budget.currency()},
          {"deadline", s.deadline.units()}};
}

ServiceTime read_service(Reader& r, const json& j, const std::string& path) {
  ServiceTime s;
  if (j.is_number()) {
    s.family = ServiceTime::Family::kFixed;
    s.value = j.get<double>();
  } else if (j.is_object()) {
    const auto fam = r.string(j, path, "family", std::string("lognormal"));
    if (auto f = service_family_from_string(fam)) {
      s.family = *f;
    } else {
      r.issue(path + "/family", "unknown family '" + fam + "'");
    }
    switch (s.family) {
      case ServiceTime::Family::kLognormal:
        s.median = r.number(j, path, "median", std::nullopt);
        s.sigma = r.number(j, path, "sigma", 0.5);
        break;
      case ServiceTime::Family::kExponential:
        s.mean = r.number(j, path, "mean", std::nullopt);
        break;
      case ServiceTime::Family::kFixed:
        s.value = r.number(j, path, "value", std::nullopt);
        break;
    }
  } else {
    r.issue(path, "expected an object or a number");
  }
  r.check(path, [&] { check_service_time(s); });
  return s;
}

json service_to_json(const ServiceTime& s) {
  switch (s.family) {
    case ServiceTime::Family::kLognormal:
      return {{"family", "lognormal"}, {"median", s.median}, {"sigma", s.sigma}};
    case ServiceTime::Family::kExponential:
      return {{"family", "exponential"}, {"mean", s.mean}};
    case ServiceTime::Family::kFixed:
      return {{"family", "fixed"}, {"value", s.value}};
  }
  return {};
}

ControllerConfig read_controller(Reader& r, const json& j,
                                 const std::string& path) {
  ControllerConfig c;
  if (!j.is_object()) {
    r.issue(path, "expected an object");
    return c;
  }
  c.enabled = r.boolean(j, path, "enabled", c.enabled);
  c.K = static_cast<int>(r.integer(j, path, "K", c.K));
  c.initial_lambda = r.number(j, path, "initial_lambda", c.initial_lambda);
  c.replication_w =
      static_cast<int>(r.integer(j, path, "replication_w", c.replication_w));
  c.machine_replication = static_cast<int>(
      r.integer(j, path, "machine_replication", c.machine_replication));
  c.reward_per_assignment = Money::from_currency(
      r.number(j, path, "reward", c.reward_per_assignment.currency()));
  c.ewma_alpha = r.number(j, path, "ewma_alpha", c.ewma_alpha);
  c.incentive_step = r.number(j, path, "incentive_step", c.incentive_step);
  c.lambda_decay = r.number(j, path, "lambda_decay", c.lambda_decay);
  c.elasticity = r.number(j, path, "elasticity", c.elasticity);
  c.assignment_timeout = Duration::from_units(
      r.number(j, path, "assignment_timeout", c.assignment_timeout.units()));
  c.max_extra_per_microtask = static_cast<int>(r.integer(
      j, path, "max_extra_per_microtask", c.max_extra_per_microtask));
  const auto voting = r.string(j, path, "voting", std::string("majority"));
  if (voting == "majority") {
    c.voting = VotingRule::kMajority;
  } else if (voting == "plurality") {
    c.voting = VotingRule::kPlurality;
  } else {
    r.issue(path + "/voting", "expected 'majority' or 'plurality'");
  }
  r.check(path, [&] { check_controller_config(c); });
  return c;
}

json controller_to_json(const ControllerConfig& c) {
  return {{"enabled", c.enabled},
          {"K", c.K},
          {"initial_lambda", c.initial_lambda},
          {"replication_w", c.replication_w},
          {"machine_replication", c.machine_replication},
          {"reward", c.reward_per_assignment.currency()},
          {"ewma_alpha", c.ewma_alpha},
          {"incentive_step", c.incentive_step},
          {"lambda_decay", c.lambda_decay},
          {"elasticity", c.elasticity},
          {"assignment_timeout", c.assignment_timeout.units()},
          {"max_extra_per_microtask", c.max_extra_per_microtask},
          {"voting", to_string(c.voting)}};
}

std::string line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace

LoadResult scenario_from_json(const json& doc) {
  LoadResult out;
  Reader r(out.issues);
  Scenario s;
  if (!doc.is_object()) {
    r.issue("/", "scenario must be a JSON object");
    return out;
  }
  const auto schema = r.string(doc, "", "schema", std::nullopt);
  if (!schema.empty() && schema != kScenarioSchema) {
    r.issue("/schema", "unsupported schema '" + schema + "', expected '" +
                           kScenarioSchema + "'");
  }
  s.name = r.string(doc, "", "name", std::nullopt);
  {
    const json* seed = r.member(doc, "", "seed", false);
    if (seed) {
      if (seed->is_number_unsigned() || (seed->is_number_integer() &&
                                         seed->get<std::int64_t>() >= 0)) {
        s.seed = seed->get<std::uint64_t>();
      } else {
        r.issue("/seed", "expected a non-negative integer");
      }
    }
  }
  s.time_unit = r.string(doc, "", "time_unit", std::string("minute"));
  if (s.time_unit.empty()) r.issue("/time_unit", "must not be empty");

  if (const json* slo = r.member(doc, "", "slo", true)) {
    s.graph.task_slo = read_slo(r, *slo, "/slo");
  }

  if (const json* ctl = r.member(doc, "", "controller", false)) {
    s.controller = read_controller(r, *ctl, "/controller");
  }

  std::set<std::string> class_names, machine_names;
  if (const json* wc = r.member(doc, "", "worker_classes", false)) {
    if (!wc->is_array()) r.issue("/worker_classes", "expected an array");
    for (std::size_t i = 0; wc->is_array() && i < wc->size(); ++i) {
      const std::string p = "/worker_classes/" + std::to_string(i);
      const json& j = (*wc)[i];
      WorkerClass c;
      c.name = r.string(j, p, "name", std::nullopt);
      if (!class_names.insert(c.name).second) {
        r.issue(p + "/name", "duplicate worker class '" + c.name + "'");
      }
      if (j.is_object() && j.contains("target_majority_accuracy")) {
        const double target =
            r.number(j, p, "target_majority_accuracy", std::nullopt);
        c.target_majority_accuracy = target;
        // Strict-majority accuracy does not depend on the domain size.
        r.check(p + "/target_majority_accuracy", [&] {
          c.accuracy_p =
              invert_majority_accuracy(target, s.controller.replication_w, 2);
        });
      } else {
        c.accuracy_p = r.number(j, p, "accuracy", std::nullopt);
      }
      if (const json* st = r.member(j, p, "service_time", true)) {
        c.service_time = read_service(r, *st, p + "/service_time");
      }
      c.arrival_rate = r.number(j, p, "arrival_rate", std::nullopt);
      c.base_reward_accepted =
          Money::from_currency(r.number(j, p, "base_reward", 0.0));
      c.retention = r.number(j, p, "retention", 0.5);
      r.check(p, [&] { check_worker_class(c); });
      s.worker_classes.push_back(std::move(c));
    }
  }
  if (const json* ma = r.member(doc, "", "machine_agents", false)) {
    if (!ma->is_array()) r.issue("/machine_agents", "expected an array");
    for (std::size_t i = 0; ma->is_array() && i < ma->size(); ++i) {
      const std::string p = "/machine_agents/" + std::to_string(i);
      const json& j = (*ma)[i];
      MachineAgentProfile m;
      m.name = r.string(j, p, "name", std::nullopt);
      if (!machine_names.insert(m.name).second) {
        r.issue(p + "/name", "duplicate machine agent '" + m.name + "'");
      }
      m.accuracy_p = r.number(j, p, "accuracy", std::nullopt);
      m.service_time_per_item =
          Duration::from_units(r.number(j, p, "service_time", std::nullopt));
      m.cost_per_item = Money::from_currency(r.number(j, p, "cost", 0.0));
      m.capacity = static_cast<int>(r.integer(j, p, "capacity", 1));
      r.check(p, [&] { check_machine_profile(m); });
      s.machine_agents.push_back(std::move(m));
    }
  }

  if (const json* wf = r.member(doc, "", "workflow", true)) {
    const json* nodes = r.member(*wf, "/workflow", "nodes", true);
    if (nodes && !nodes->is_array()) {
      r.issue("/workflow/nodes", "expected an array");
    }
    for (std::size_t i = 0; nodes && nodes->is_array() && i < nodes->size();
         ++i) {
      const std::string p = "/workflow/nodes/" + std::to_string(i);
      const json& j = (*nodes)[i];
      WorkflowNode n;
      n.id = r.string(j, p, "id", std::nullopt);
      n.label = r.string(j, p, "label", n.id);
      const auto tag = r.string(j, p, "agent_tag", std::string("either"));
      if (auto t = agent_tag_from_string(tag)) {
        n.agent_tag = *t;
      } else {
        r.issue(p + "/agent_tag",
                "expected 'human_only', 'machine_only' or 'either'");
      }
      n.microtask_count =
          static_cast<int>(r.integer(j, p, "microtasks", std::nullopt));
      if (n.microtask_count < 0) r.issue(p + "/microtasks", "must be >= 0");
      if (const json* cats = r.member(j, p, "categories", true)) {
        if (cats->is_number_integer()) {
          const auto c = cats->get<std::int64_t>();
          if (c < 2 || c > 1000) {
            r.issue(p + "/categories", "category count must lie in [2, 1000]");
          }
          for (std::int64_t k = 0; k < c && k <= 1000; ++k) {
            n.categories.push_back("c" + std::to_string(k));
          }
        } else {
          n.categories = r.strings(j, p, "categories");
          r.check(p + "/categories",
                  [&] { make_answer_domain(n.categories); });
        }
      }
      if (const json* slo = r.member(j, p, "slo", false)) {
        n.node_slo = read_slo(r, *slo, p + "/slo");
      }
      n.worker_classes = r.strings(j, p, "worker_classes");
      n.machine_agents = r.strings(j, p, "machine_agents");
      for (std::size_t k = 0; k < n.worker_classes.size(); ++k) {
        if (!class_names.count(n.worker_classes[k])) {
          r.issue(p + "/worker_classes/" + std::to_string(k),
                  "unresolved reference to worker class '" +
                      n.worker_classes[k] + "'");
        }
      }
      for (std::size_t k = 0; k < n.machine_agents.size(); ++k) {
        if (!machine_names.count(n.machine_agents[k])) {
          r.issue(p + "/machine_agents/" + std::to_string(k),
                  "unresolved reference to machine agent '" +
                      n.machine_agents[k] + "'");
        }
      }
      s.graph.nodes.push_back(std::move(n));
    }
    const json* edges = r.member(*wf, "/workflow", "edges", false);
    if (edges && !edges->is_array()) {
      r.issue("/workflow/edges", "expected an array");
    }
    for (std::size_t i = 0; edges && edges->is_array() && i < edges->size();
         ++i) {
      const json& e = (*edges)[i];
      if (!e.is_array() || e.size() != 2 || !e[0].is_string() ||
          !e[1].is_string()) {
        r.issue("/workflow/edges/" + std::to_string(i),
                "expected [\"from\", \"to\"]");
        continue;
      }
      s.graph.edges.emplace_back(e[0].get<std::string>(),
                                 e[1].get<std::string>());
    }
    for (const auto& v : validate(s.graph).violations) {
      if (v.kind == Violation::Kind::kInvalidNode) continue;  // reported above
      r.issue("/workflow", v.message);
    }
  }

  if (const json* sc = r.member(doc, "", "script", false)) {
    if (!sc->is_array()) r.issue("/script", "expected an array");
    for (std::size_t i = 0; sc->is_array() && i < sc->size(); ++i) {
      const std::string p = "/script/" + std::to_string(i);
      const json& j = (*sc)[i];
      ScriptEntry e;
      e.at = SimTime::from_units(r.number(j, p, "at", std::nullopt));
      if (e.at.ticks < 0) r.issue(p + "/at", "must be >= 0");
      const auto op = r.string(j, p, "action", std::nullopt);
      e.value = r.number(j, p, "value", std::nullopt);
      if (op == "set_arrival_rate") {
        e.op = ScriptEntry::Op::kSetArrivalRate;
        e.target = r.string(j, p, "class", std::nullopt);
        if (!class_names.count(e.target)) {
          r.issue(p + "/class",
                  "unresolved reference to worker class '" + e.target + "'");
        }
        if (!(e.value >= 0.0)) r.issue(p + "/value", "rate must be >= 0");
      } else if (op == "set_lambda") {
        e.op = ScriptEntry::Op::kSetLambda;
        if (!(e.value >= 0.0)) r.issue(p + "/value", "lambda must be >= 0");
      } else if (op == "set_incentive") {
        e.op = ScriptEntry::Op::kSetIncentive;
        if (!(e.value >= 1.0)) r.issue(p + "/value", "incentive must be >= 1");
      } else if (!op.empty()) {
        r.issue(p + "/action", "unknown action '" + op + "'");
      }
      s.script.push_back(std::move(e));
    }
  }

  // Every node needs at least one agent it is allowed to use.
  for (std::size_t i = 0; i < s.graph.nodes.size(); ++i) {
    const auto& n = s.graph.nodes[i];
    const std::string p = "/workflow/nodes/" + std::to_string(i);
    const bool humans = !eligible_worker_classes(s, n).empty();
    const int machines = static_cast<int>(eligible_machine_agents(s, n).size());
    const bool ok = n.agent_tag == AgentTag::kHumanOnly     ? humans
                    : n.agent_tag == AgentTag::kMachineOnly ? machines > 0
                                                            : humans || machines;
    if (!ok) {
      r.issue(p + "/agent_tag",
              std::string("unresolved reference: node tagged ") +
                  to_string(n.agent_tag) + " has no matching agent profile");
    }
    if (n.agent_tag != AgentTag::kHumanOnly && machines > 0 &&
        s.controller.machine_replication > machines) {
      r.issue("/controller/machine_replication",
              "exceeds the machine agents available to node '" + n.id + "'");
    }
  }

  if (out.issues.empty()) out.scenario = std::move(s);
  return out;
}

LoadResult parse_scenario(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    LoadResult out;
    out.issues.push_back({line_column(text, e.byte > 0 ? e.byte - 1 : 0),
                          std::string("syntax error: ") + e.what()});
    return out;
  }
  return scenario_from_json(doc);
}

LoadResult load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    LoadResult out;
    out.issues.push_back({path.string(), "cannot open scenario file"});
    return out;
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

json scenario_to_json(const Scenario& s) {
  json doc;
  doc["schema"] = kScenarioSchema;
  doc["name"] = s.name;
  doc["seed"] = s.seed;
  doc["time_unit"] = s.time_unit;
  doc["slo"] = slo_to_json(s.graph.task_slo);
  doc["controller"] = controller_to_json(s.controller);
  json classes = json::array();
  for (const auto& c : s.worker_classes) {
    json j = {{"name", c.name},
              {"service_time", service_to_json(c.service_time)},
              {"arrival_rate", c.arrival_rate},
              {"base_reward", c.base_reward_accepted.currency()},
              {"retention", c.retention}};
    if (c.target_majority_accuracy) {
      j["target_majority_accuracy"] = *c.target_majority_accuracy;
    } else {
      j["accuracy"] = c.accuracy_p;
    }
    classes.push_back(std::move(j));
  }
  doc["worker_classes"] = std::move(classes);
  json machines = json::array();
  for (const auto& m : s.machine_agents) {
    machines.push_back({{"name", m.name},
                        {"accuracy", m.accuracy_p},
                        {"service_time", m.service_time_per_item.units()},
                        {"cost", m.cost_per_item.currency()},
                        {"capacity", m.capacity}});
  }
  doc["machine_agents"] = std::move(machines);
  json nodes = json::array();
  for (const auto& n : s.graph.nodes) {
    json j = {{"id", n.id},
              {"label", n.label},
              {"agent_tag", to_string(n.agent_tag)},
              {"microtasks", n.microtask_count},
              {"categories", n.categories}};
    if (n.node_slo) j["slo"] = slo_to_json(*n.node_slo);
    if (!n.worker_classes.empty()) j["worker_classes"] = n.worker_classes;
    if (!n.machine_agents.empty()) j["machine_agents"] = n.machine_agents;
    nodes.push_back(std::move(j));
  }
  json edges = json::array();
  for (const auto& [from, to] : s.graph.edges) edges.push_back({from, to});
  doc["workflow"] = {{"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
  json script = json::array();
  for (const auto& e : s.script) {
    json j = {{"at", e.at.units()}, {"action", to_string(e.op)},
              {"value", e.value}};
    if (e.op == ScriptEntry::Op::kSetArrivalRate) j["class"] = e.target;
    script.push_back(std::move(j));
  }
  doc["script"] = std::move(script);
  return doc;
}

std::string write_scenario(const Scenario& s) {
  return scenario_to_json(s).dump(2) + "\n";
}

LoadResult apply_overrides(
    const Scenario& s,
    const std::vector<std::pair<std::string, std::string>>& overrides) {
  json doc = scenario_to_json(s);
  LoadResult bad;
  for (const auto& [key, raw] : overrides) {
    std::string pointer;
    std::stringstream ss(key);
    std::string part;
    while (std::getline(ss, part, '.')) pointer += "/" + part;
    json::json_pointer ptr;
    try {
      ptr = json::json_pointer(pointer);
    } catch (const json::exception&) {
      bad.issues.push_back({key, "malformed override path"});
      continue;
    }
    if (!doc.contains(ptr) || doc.at(ptr).is_structured()) {
      bad.issues.push_back({pointer, "override must name an existing scalar"});
      continue;
    }
    json value;
    try {
      value = json::parse(raw);
    } catch (const json::parse_error&) {
      value = raw;
    }
    doc[ptr] = value;
    // A calibrated accuracy is recomputed from its target; a literal
    // accuracy override replaces the calibration.
    if (ptr.parent_pointer().to_string().rfind("/worker_classes/", 0) == 0 &&
        ptr.back() == "accuracy") {
      doc[ptr.parent_pointer()].erase("target_majority_accuracy");
    }
  }
  if (!bad.issues.empty()) return bad;
  return scenario_from_json(doc);
}

std::string scenario_digest(const Scenario& s) {
  const std::string canon = scenario_to_json(s).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canon) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<int> eligible_worker_classes(const Scenario& s,
                                         const WorkflowNode& node) {
  std::vector<int> out;
  if (node.agent_tag == AgentTag::kMachineOnly) return out;
  for (std::size_t i = 0; i < s.worker_classes.size(); ++i) {
    const auto& allowed = node.worker_classes;
    if (allowed.empty() || std::find(allowed.begin(), allowed.end(),
                                     s.worker_classes[i].name) != allowed.end()) {
      out.push_back(static_cast<int>(i));
    }
  }
  return out;
}

std::vector<int> eligible_machine_agents(const Scenario& s,
                                         const WorkflowNode& node) {
  std::vector<int> out;
  if (node.agent_tag == AgentTag::kHumanOnly) return out;
  for (std::size_t i = 0; i < s.machine_agents.size(); ++i) {
    const auto& allowed = node.machine_agents;
    if (allowed.empty() || std::find(allowed.begin(), allowed.end(),
                                     s.machine_agents[i].name) != allowed.end()) {
      out.push_back(static_cast<int>(i));
    }
  }
  return out;
}

}  // namespace hmflow

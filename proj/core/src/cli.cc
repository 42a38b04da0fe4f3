// Copyright 2026 The WNetKAT authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "wnetkat/cli.h"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "wnetkat/evaluator.h"
#include "wnetkat/expr.h"
#include "wnetkat/field.h"
#include "wnetkat/netmodel.h"
#include "wnetkat/parser.h"
#include "wnetkat/semiring.h"
#include "wnetkat/wfa.h"
#include "wnetkat/world.h"

namespace wnetkat {
namespace cli {
namespace {

using nlohmann::ordered_json;

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::string> SplitList(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) {
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

Weight ParseWeightFlag(const std::string& text, const std::string& flag) {
  std::optional<Weight> w = Weight::parse(text);
  if (!w.has_value()) {
    throw std::runtime_error("malformed weight '" + text + "' for " + flag);
  }
  return *w;
}

std::string RenderValue(const Value& v) { return to_string(v); }

std::vector<std::string> HistoryPath(const World& w) {
  std::vector<std::string> path;
  for (auto it = w.history.rbegin(); it != w.history.rend(); ++it) {
    auto f = it->fields.find("sw");
    if (f != it->fields.end()) path.push_back(RenderValue(f->second));
  }
  return path;
}

std::string JoinPath(const std::vector<std::string>& path) {
  std::string out;
  for (const std::string& p : path) {
    if (!out.empty()) out += " -> ";
    out += p;
  }
  return out;
}

// Deterministic one-line rendering; report ordering sorts on it.
std::string RenderWorld(const World& w) {
  std::string s = "head{";
  bool first = true;
  for (const auto& [name, value] : w.head().fields) {
    if (!first) s += ",";
    first = false;
    s += name + "=" + RenderValue(value);
  }
  s += "} path[" + JoinPath(HistoryPath(w)) + "]";
  if (!w.rho.entries.empty()) {
    s += " state{";
    first = true;
    for (const auto& [key, value] : w.rho.entries) {
      if (!first) s += ",";
      first = false;
      s += key.first + "." + key.second + "=" + RenderValue(value);
    }
    s += "}";
  }
  bool any_queued = false;
  for (const auto& [key, items] : w.queues.queues) {
    any_queued = any_queued || !items.empty();
  }
  if (any_queued) {
    s += " queues{";
    first = true;
    for (const auto& [key, items] : w.queues.queues) {
      if (items.empty()) continue;
      if (!first) s += ",";
      first = false;
      s += key.first + "." + key.second + ":" +
           std::to_string(items.size());
    }
    s += "}";
  }
  return s;
}

struct Report {
  std::string command;
  std::optional<DropOutcome> outcome;
  std::optional<World> witness;
  std::optional<Weight> optimal;
  std::optional<bool> saturated;
  // Extra (key, value) text lines and verbatim blocks, echoed into the JSON
  // document under their keys.
  std::vector<std::pair<std::string, std::string>> lines;
  std::vector<std::string> blocks;
  ordered_json extra = ordered_json::object();
};

using Clock = std::chrono::steady_clock;

double ElapsedSince(Clock::time_point started) {
  return std::chrono::duration<double, std::milli>(Clock::now() - started)
      .count();
}

int ExitFor(const Report& r) {
  if (!r.outcome.has_value()) return kExitNotDrop;
  switch (*r.outcome) {
    case DropOutcome::NotDrop:
      return kExitNotDrop;
    case DropOutcome::IsDrop:
      return kExitIsDrop;
    case DropOutcome::Unknown:
      return kExitUnknown;
  }
  return kExitUnknown;
}

int Emit(const Report& r, bool json_format, Clock::time_point started,
         std::ostream& out) {
  const double elapsed_ms = ElapsedSince(started);
  if (json_format) {
    ordered_json doc;
    doc["command"] = r.command;
    doc["verdict"] =
        r.outcome.has_value() ? ordered_json(to_string(*r.outcome))
                              : ordered_json(nullptr);
    if (r.witness.has_value()) {
      ordered_json w;
      w["path"] = HistoryPath(*r.witness);
      ordered_json head = ordered_json::object();
      for (const auto& [name, value] : r.witness->head().fields) {
        head[name] = RenderValue(value);
      }
      w["head"] = head;
      doc["witness"] = w;
    } else {
      doc["witness"] = nullptr;
    }
    doc["optimal_weight"] = r.optimal.has_value()
                                ? ordered_json(r.optimal->to_string())
                                : ordered_json(nullptr);
    doc["saturated"] = r.saturated.has_value() ? ordered_json(*r.saturated)
                                               : ordered_json(nullptr);
    doc["elapsed_ms"] = elapsed_ms;
    for (const auto& [key, value] : r.lines) doc[key] = value;
    for (const auto& [key, value] : r.extra.items()) doc[key] = value;
    out << doc.dump(2) << "\n";
  } else {
    out << "command: " << r.command << "\n";
    if (r.outcome.has_value()) {
      out << "verdict: " << to_string(*r.outcome) << "\n";
    }
    if (r.witness.has_value()) {
      out << "witness: " << JoinPath(HistoryPath(*r.witness)) << "\n";
      out << "witness world: " << RenderWorld(*r.witness) << "\n";
    }
    if (r.optimal.has_value()) {
      out << "optimal weight: " << r.optimal->to_string() << "\n";
    }
    for (const auto& [key, value] : r.lines) {
      out << key << ": " << value << "\n";
    }
    if (r.saturated.has_value()) {
      out << "saturated: " << (*r.saturated ? "true" : "false") << "\n";
    }
    out << "elapsed_ms: " << elapsed_ms << "\n";
    for (const std::string& block : r.blocks) out << block;
  }
  return ExitFor(r);
}

// k=v pairs; undeclared names become quantitative when the value parses as
// a weight, non-quantitative symbols otherwise.
void DeclarePacketSpec(const std::string& spec, FieldUniverse& universe) {
  for (const std::string& pair : SplitList(spec, ',')) {
    auto eq = pair.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("malformed packet field '" + pair +
                               "', expected name=value");
    }
    std::string name = pair.substr(0, eq);
    std::string value = pair.substr(eq + 1);
    if (!universe.is_declared(name)) {
      universe.declare(name,
                       Weight::parse(value).has_value()
                           ? FieldKind::Quantitative
                           : FieldKind::NonQuantitative,
                       FieldScope::PacketVar);
    }
    if (universe.field(name).kind == FieldKind::NonQuantitative) {
      universe.add_symbol(name, value);
    }
  }
}

void ApplyPacketSpec(const std::string& spec, const FieldUniverse& universe,
                     World& w) {
  for (const std::string& pair : SplitList(spec, ',')) {
    auto eq = pair.find('=');
    std::string name = pair.substr(0, eq);
    std::string value = pair.substr(eq + 1);
    if (universe.field(name).kind == FieldKind::Quantitative) {
      packet_write(w, universe, name, quantity(*Weight::parse(value)));
    } else {
      packet_write(w, universe, name, symbol(value));
    }
  }
}

// State file: lines "<switch> <field> <value>"; '#' comments.
void ApplyStateFile(const std::string& text, FieldUniverse& universe,
                    SwitchValuation& rho) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream fields(line);
    std::string sw, name, value;
    if (!(fields >> sw)) continue;
    if (!(fields >> name >> value)) {
      throw std::runtime_error("malformed state line '" + line +
                               "', expected: switch field value");
    }
    std::optional<Weight> w = Weight::parse(value);
    if (!universe.is_declared(name)) {
      universe.declare(name,
                       w.has_value() ? FieldKind::Quantitative
                                     : FieldKind::NonQuantitative,
                       FieldScope::SwitchVar);
    }
    universe.add_symbol("sw", sw);
    if (universe.field(name).kind == FieldKind::Quantitative) {
      if (!w.has_value()) {
        throw std::runtime_error("state variable '" + name +
                                 "' needs a numeric value");
      }
      rho.entries[{sw, name}] = quantity(*w);
    } else {
      universe.add_symbol(name, value);
      rho.entries[{sw, name}] = symbol(value);
    }
  }
}

StructureKind StructureFromFlag(const std::string& name) {
  std::optional<StructureKind> kind = parse_structure_kind(name);
  if (!kind.has_value()) {
    throw std::runtime_error(
        "unknown structure '" + name +
        "', expected min-plus, max-plus, max-min or add-min");
  }
  return *kind;
}

struct CommonFlags {
  bool json = false;
  int fuel = 0;  // 0 means: use the query or evaluator default
};

int RunParse(const std::string& expr_file, const CommonFlags& common,
             std::ostream& out, Clock::time_point started) {
  ParsedExpr parsed = parse_expr(ReadFile(expr_file));
  Report r;
  r.command = "parse";
  r.lines.emplace_back("expr", render_expr(parsed.expr));
  return Emit(r, common.json, started, out);
}

int RunEval(const std::string& expr_file, const std::string& packet_spec,
            const std::string& state_file, const std::string& mode_name,
            const CommonFlags& common, std::ostream& out,
            Clock::time_point started) {
  ParsedExpr parsed = parse_expr(ReadFile(expr_file));
  DeclarePacketSpec(packet_spec, parsed.universe);
  World w = initial_world(parsed.universe);
  if (!state_file.empty()) {
    ApplyStateFile(ReadFile(state_file), parsed.universe, w.rho);
  }
  ApplyPacketSpec(packet_spec, parsed.universe, w);

  EvalConfig cfg;
  if (common.fuel > 0) cfg.fuel = common.fuel;
  if (mode_name == "shared") cfg.mode = EvalMode::SharedState;
  EvalResult result = cfg.mode == EvalMode::SharedState
                          ? run_shared(parsed.expr, {w}, parsed.universe, cfg)
                          : evaluate(parsed.expr, w, parsed.universe, cfg);

  std::vector<std::string> rendered;
  for (const World& rw : result.worlds) rendered.push_back(RenderWorld(rw));
  std::sort(rendered.begin(), rendered.end());

  Report r;
  r.command = "eval";
  r.saturated = result.saturated;
  r.outcome = !result.worlds.empty()
                  ? DropOutcome::NotDrop
                  : (result.saturated ? DropOutcome::IsDrop
                                      : DropOutcome::Unknown);
  r.lines.emplace_back("worlds", std::to_string(rendered.size()));
  r.extra["world_list"] = rendered;
  std::string block;
  for (const std::string& line : rendered) block += "world: " + line + "\n";
  r.blocks.push_back(block);
  return Emit(r, common.json, started, out);
}

int RunCheck(const std::string& expr_file, const std::string& inputs_file,
             const std::string& backend, const std::string& structure_name,
             const CommonFlags& common, std::ostream& out, std::ostream& err,
             Clock::time_point started) {
  ParsedExpr parsed = parse_expr(ReadFile(expr_file));

  std::string used_backend = "eval";
  std::optional<bool> wfa_empty;
  if (backend == "wfa" || backend == "auto") {
    ClassifyResult c = classify_weight_regular(
        parsed.expr, StructureFromFlag(structure_name), parsed.universe);
    if (c.accepted.has_value()) {
      wfa_empty = emptiness(expr_to_wfa(*c.accepted, parsed.universe));
      used_backend = "wfa";
    } else if (backend == "wfa") {
      err << "not weight-regular: " << c.refusal << "\n";
      return kExitUsage;
    }
  }

  Report r;
  r.command = "check";
  r.lines.emplace_back("backend", used_backend);
  if (wfa_empty.has_value()) {
    r.outcome = *wfa_empty ? DropOutcome::IsDrop : DropOutcome::NotDrop;
  } else {
    std::vector<World> inputs;
    if (!inputs_file.empty()) {
      std::istringstream in(ReadFile(inputs_file));
      std::string line;
      std::vector<std::string> specs;
      while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        specs.push_back(line);
      }
      for (const std::string& spec : specs) {
        DeclarePacketSpec(spec, parsed.universe);
      }
      for (const std::string& spec : specs) {
        World w = initial_world(parsed.universe);
        ApplyPacketSpec(spec, parsed.universe, w);
        inputs.push_back(std::move(w));
      }
    } else {
      inputs.push_back(initial_world(parsed.universe));
    }
    EvalConfig cfg;
    if (common.fuel > 0) cfg.fuel = common.fuel;
    DropReport report = drop_check(parsed.expr, inputs, parsed.universe, cfg);
    r.outcome = report.outcome;
    r.witness = report.witness;
    r.saturated = report.saturated;
  }
  return Emit(r, common.json, started, out);
}

int RunCompileWfa(const std::string& expr_file, const std::string& topo_file,
                  const std::string& src, const std::string& dst,
                  const std::string& bound, const std::string& structure_name,
                  const std::string& out_file, const CommonFlags& common,
                  std::ostream& out, std::ostream& err,
                  Clock::time_point started) {
  Expression expr;
  FieldUniverse universe;
  if (!expr_file.empty()) {
    ParsedExpr parsed = parse_expr(ReadFile(expr_file));
    expr = parsed.expr;
    universe = parsed.universe;
  } else if (!topo_file.empty()) {
    Topology t = parse_topology(ReadFile(topo_file));
    FieldUniverse scratch;
    Expression flood = flood_policy(t, scratch);
    BuiltQuery q = cost_reach_query(
        t, flood, src, dst,
        bound.empty() ? Weight::infinity()
                      : ParseWeightFlag(bound, "--bound"));
    expr = q.expr;
    universe = q.universe;
  } else {
    err << "compile-wfa needs --expr, or --topology with --src/--dst\n";
    return kExitUsage;
  }

  StructureKind kind = StructureFromFlag(structure_name);
  ClassifyResult c = classify_weight_regular(expr, kind, universe);
  if (!c.accepted.has_value()) {
    err << "not weight-regular: " << c.refusal << "\n";
    return kExitUsage;
  }
  WeightedAutomaton a = expr_to_wfa(*c.accepted, universe);
  std::string text = export_automaton(a);
  if (!out_file.empty()) {
    std::ofstream file(out_file, std::ios::binary);
    if (!file) throw std::runtime_error("cannot write file '" + out_file + "'");
    file << text;
  }

  Report r;
  r.command = "compile-wfa";
  r.lines.emplace_back("structure", to_string(kind));
  r.lines.emplace_back("states", std::to_string(a.state_count));
  r.lines.emplace_back("empty", emptiness(a) ? "true" : "false");
  if (make_structure(kind).idempotent_plus()) {
    OptimalWeight best = optimal_weight(a);
    r.optimal = best.value;
    if (!best.note.empty()) r.lines.emplace_back("note", best.note);
  }
  if (out_file.empty()) {
    r.extra["automaton"] = text;
    r.blocks.push_back(text);
  } else {
    r.lines.emplace_back("written", out_file);
  }
  return Emit(r, common.json, started, out);
}

Expression LoadPolicyOrFlood(const std::string& policy_file, const Topology& t,
                             FieldUniverse& scratch) {
  if (policy_file.empty()) return flood_policy(t, scratch);
  return parse_expr(ReadFile(policy_file), scratch).expr;
}

int FinishQuery(BuiltQuery q, const char* name, const CommonFlags& common,
                std::ostream& out, Clock::time_point started) {
  if (common.fuel > 0) q.suggested_fuel = common.fuel;
  Verdict v = run_query(q);
  Report r;
  r.command = std::string("query ") + name;
  r.outcome = v.outcome;
  r.witness = v.witness;
  r.saturated = v.saturated;
  r.lines.emplace_back("fuel", std::to_string(q.suggested_fuel));
  return Emit(r, common.json, started, out);
}

int RunFairness(const std::string& topo_file, const std::string& flows_file,
                const CommonFlags& common, std::ostream& out,
                Clock::time_point started) {
  Topology t = parse_topology(ReadFile(topo_file));
  FlowSet flows = parse_flows(ReadFile(flows_file));
  std::vector<std::pair<Flow, Verdict>> verdicts = fairness_check(t, flows);

  bool any_unknown = false;
  bool any_drop = false;
  Report r;
  r.command = "query fairness";
  r.saturated = true;
  ordered_json flow_list = ordered_json::array();
  for (const auto& [flow, verdict] : verdicts) {
    any_unknown = any_unknown || verdict.outcome == DropOutcome::Unknown;
    any_drop = any_drop || verdict.outcome == DropOutcome::IsDrop;
    r.saturated = *r.saturated && verdict.saturated;
    std::string label = "flow " + flow.src + "->" + flow.dst +
                        " rate=" + flow.rate.to_string();
    r.lines.emplace_back(label, to_string(verdict.outcome));
    ordered_json entry;
    entry["src"] = flow.src;
    entry["dst"] = flow.dst;
    entry["rate"] = flow.rate.to_string();
    entry["verdict"] = to_string(verdict.outcome);
    flow_list.push_back(entry);
  }
  r.extra["flows"] = flow_list;
  r.outcome = any_drop ? DropOutcome::IsDrop
                       : (any_unknown ? DropOutcome::Unknown
                                      : DropOutcome::NotDrop);
  return Emit(r, common.json, started, out);
}

int RunQos(const std::string& sw, const std::string& in_port,
           const std::string& out_port, const std::string& shares_spec,
           const std::string& packets_spec, bool queued,
           const CommonFlags& common, std::ostream& out,
           Clock::time_point started) {
  std::vector<std::pair<std::string, int>> shares;
  for (const std::string& pair : SplitList(shares_spec, ',')) {
    auto eq = pair.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("malformed share '" + pair +
                               "', expected priority=quota");
    }
    shares.emplace_back(pair.substr(0, eq),
                        std::stoi(pair.substr(eq + 1)));
  }

  FieldUniverse universe;
  if (queued) {
    for (const auto& [prio, quota] : shares) {
      universe.declare_queue(sw, "q_" + prio,
                             FieldUniverse::kDefaultQueueCapacity);
    }
  }
  Expression policy =
      queued ? qos_queue_policy(sw, out_port, shares, universe)
             : qos_policy(sw, {in_port}, out_port, shares, universe);

  // One seed per arriving packet; every seed shares the zeroed counters.
  SwitchValuation rho;
  for (const auto& [prio, quota] : shares) {
    rho.entries[{sw, "C_" + prio}] = quantity(Weight::integer(0));
    if (queued) {
      rho.entries[{sw, "n_" + prio}] = quantity(Weight::integer(0));
    }
  }
  // Each seed carries a serial number so result worlds never collapse and
  // one world per forwarded copy survives the set.
  universe.declare("id", FieldKind::Quantitative, FieldScope::PacketVar);
  std::vector<World> seeds;
  for (const std::string& group : SplitList(packets_spec, ',')) {
    auto colon = group.find(':');
    if (colon == std::string::npos) {
      throw std::runtime_error("malformed packet group '" + group +
                               "', expected priority:count");
    }
    std::string prio = group.substr(0, colon);
    int count = std::stoi(group.substr(colon + 1));
    for (int i = 0; i < count; ++i) {
      World w = initial_world(universe);
      w.rho = rho;
      packet_write(w, universe, "sw", symbol(sw));
      packet_write(w, universe, "pt", symbol(in_port));
      packet_write(w, universe, "x", symbol(prio));
      packet_write(w, universe, "id",
                   quantity(Weight::integer(
                       static_cast<std::int64_t>(seeds.size()) + 1)));
      seeds.push_back(std::move(w));
    }
  }
  if (seeds.empty()) {
    World w = initial_world(universe);
    w.rho = rho;
    seeds.push_back(std::move(w));
  }

  EvalConfig cfg;
  cfg.mode = EvalMode::SharedState;
  if (common.fuel > 0) cfg.fuel = common.fuel;
  EvalResult result = run_shared(policy, seeds, universe, cfg);

  std::map<std::string, int> forwarded;
  for (const auto& [prio, quota] : shares) forwarded[prio] = 0;
  for (const World& w : result.worlds) {
    auto x = w.head().fields.find("x");
    auto pt = w.head().fields.find("pt");
    if (x != w.head().fields.end() && pt != w.head().fields.end() &&
        RenderValue(pt->second) == out_port) {
      ++forwarded[RenderValue(x->second)];
    }
  }

  Report r;
  r.command = "query qos";
  r.saturated = result.saturated;
  r.outcome = !result.worlds.empty()
                  ? DropOutcome::NotDrop
                  : (result.saturated ? DropOutcome::IsDrop
                                      : DropOutcome::Unknown);
  ordered_json counts = ordered_json::object();
  for (const auto& [prio, n] : forwarded) {
    r.lines.emplace_back("forwarded " + prio, std::to_string(n));
    counts[prio] = n;
  }
  r.extra["forwarded"] = counts;
  return Emit(r, common.json, started, out);
}

std::vector<ChainFunction> WaypointChain(const std::string& waypoints,
                                         const Topology& t) {
  std::vector<ChainFunction> chain;
  for (const std::string& name : SplitList(waypoints, ',')) {
    ChainFunction fn;
    fn.name = name;
    for (const std::string& node : t.nodes) {
      if (node == name || node.rfind(name + "_", 0) == 0) {
        fn.instances.insert(node);
      }
    }
    chain.push_back(std::move(fn));
  }
  return chain;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  const Clock::time_point started = Clock::now();

  if (!args.empty() && args.front() == "equiv") {
    err << "equivalence of two expressions is undecidable here; the "
           "supported decision is emptiness (drop-equivalence) of a single "
           "expression, see 'check'\n";
    return kExitUsage;
  }

  CLI::App app{"WNetKAT: weighted network program verification"};
  app.require_subcommand(1);
  // Let --format/--fuel appear after the subcommand as well.
  app.fallthrough();
  CommonFlags common;
  app.add_flag_callback(
      "--format-json", [&common] { common.json = true; },
      "Emit the report as one JSON object");
  app.add_option_function<std::string>(
         "--format",
         [&common](const std::string& v) {
           if (v == "json") {
             common.json = true;
           } else if (v != "text") {
             throw CLI::ValidationError("--format", "expected text or json");
           }
         },
         "Report format: text or json")
      ->expected(1);
  app.add_option("--fuel", common.fuel, "Iteration budget override");

  int exit_code = kExitNotDrop;
  std::string expr_file, packet_spec, state_file, inputs_file;
  std::string mode_name = "per-world";
  std::string backend = "auto";
  std::string structure_name = "min-plus";
  std::string out_file;
  std::string topo_file, policy_file, src, dst, bound, rate;
  std::string cap_mode = "unsplit", encoding = "min";
  std::string waypoints, flows_file;
  std::string qos_switch, qos_in = "in", qos_out = "out";
  std::string shares_spec, packets_spec;
  bool queued = false;

  CLI::App* parse_cmd =
      app.add_subcommand("parse", "Parse an expression and pretty-print it");
  parse_cmd->add_option("--expr", expr_file, "Expression file")->required();
  parse_cmd->callback(
      [&] { exit_code = RunParse(expr_file, common, out, started); });

  CLI::App* eval_cmd =
      app.add_subcommand("eval", "Evaluate an expression on one packet");
  eval_cmd->add_option("--expr", expr_file, "Expression file")->required();
  eval_cmd->add_option("--packet", packet_spec, "Packet fields k=v,...");
  eval_cmd->add_option("--state", state_file,
                       "Switch state file: lines 'switch field value'");
  eval_cmd->add_option("--mode", mode_name, "per-world or shared")
      ->check(CLI::IsMember({"per-world", "shared"}));
  eval_cmd->callback([&] {
    exit_code = RunEval(expr_file, packet_spec, state_file, mode_name, common,
                        out, started);
  });

  CLI::App* check_cmd =
      app.add_subcommand("check", "Drop-equivalence check of an expression");
  check_cmd->add_option("--expr", expr_file, "Expression file")->required();
  check_cmd->add_option("--inputs", inputs_file,
                        "Input packets file, one k=v,... spec per line");
  check_cmd->add_option("--backend", backend, "auto, eval or wfa")
      ->check(CLI::IsMember({"auto", "eval", "wfa"}));
  check_cmd->add_option("--structure", structure_name,
                        "Weight structure for the wfa backend");
  check_cmd->callback([&] {
    exit_code = RunCheck(expr_file, inputs_file, backend, structure_name,
                         common, out, err, started);
  });

  CLI::App* wfa_cmd = app.add_subcommand(
      "compile-wfa", "Compile a weight-regular expression to an automaton");
  wfa_cmd->add_option("--expr", expr_file, "Expression file");
  wfa_cmd->add_option("--topology", topo_file,
                      "Build the cost query over this topology instead");
  wfa_cmd->add_option("--src", src, "Query source switch");
  wfa_cmd->add_option("--dst", dst, "Query destination switch");
  wfa_cmd->add_option("--bound", bound, "Cost bound");
  wfa_cmd->add_option("--structure", structure_name,
                      "min-plus, max-plus, max-min or add-min");
  wfa_cmd->add_option("--out", out_file, "Write the automaton text here");
  wfa_cmd->callback([&] {
    exit_code = RunCompileWfa(expr_file, topo_file, src, dst, bound,
                              structure_name, out_file, common, out, err,
                              started);
  });

  CLI::App* query_cmd =
      app.add_subcommand("query", "Topology-level verification queries");
  query_cmd->require_subcommand(1);

  CLI::App* cost_cmd =
      query_cmd->add_subcommand("cost-reach", "Bounded-cost reachability");
  cost_cmd->add_option("--topology", topo_file, "Topology file")->required();
  cost_cmd->add_option("--src", src, "Source switch")->required();
  cost_cmd->add_option("--dst", dst, "Destination switch")->required();
  cost_cmd->add_option("--bound", bound, "Cost bound (default unbounded)");
  cost_cmd->add_option("--policy", policy_file,
                       "Forwarding policy file (default: explore all ports)");
  cost_cmd->callback([&] {
    Topology t = parse_topology(ReadFile(topo_file));
    FieldUniverse scratch;
    Expression policy = LoadPolicyOrFlood(policy_file, t, scratch);
    BuiltQuery q = cost_reach_query(
        t, policy, src, dst,
        bound.empty() ? Weight::infinity()
                      : ParseWeightFlag(bound, "--bound"));
    exit_code = FinishQuery(std::move(q), "cost-reach", common, out, started);
  });

  CLI::App* cap_cmd =
      query_cmd->add_subcommand("cap-reach", "Capacitated reachability");
  cap_cmd->add_option("--topology", topo_file, "Topology file")->required();
  cap_cmd->add_option("--src", src, "Source switch")->required();
  cap_cmd->add_option("--dst", dst, "Destination switch")->required();
  cap_cmd->add_option("--rate", rate, "Demanded rate")->required();
  cap_cmd->add_option("--mode", cap_mode, "unsplit or split")
      ->check(CLI::IsMember({"unsplit", "split"}));
  cap_cmd->add_option("--encoding", encoding,
                      "Unsplittable encoding: min or guard")
      ->check(CLI::IsMember({"min", "guard"}));
  cap_cmd->add_option("--policy", policy_file,
                      "Forwarding policy file; required for split mode");
  cap_cmd->callback([&] {
    Topology t = parse_topology(ReadFile(topo_file));
    FieldUniverse scratch;
    Expression policy = LoadPolicyOrFlood(policy_file, t, scratch);
    CapMode mode = cap_mode == "split"
                       ? CapMode::Split
                       : (encoding == "guard" ? CapMode::UnsplitGuard
                                              : CapMode::UnsplitMin);
    BuiltQuery q = cap_reach_query(t, policy, src, dst,
                                   ParseWeightFlag(rate, "--rate"), mode);
    exit_code = FinishQuery(std::move(q), "cap-reach", common, out, started);
  });

  CLI::App* chain_cmd =
      query_cmd->add_subcommand("chain", "Service chain reachability");
  chain_cmd->add_option("--topology", topo_file, "Topology file")->required();
  chain_cmd->add_option("--src", src, "Source switch")->required();
  chain_cmd->add_option("--dst", dst, "Destination switch")->required();
  chain_cmd->add_option("--waypoints", waypoints, "Comma list of functions")
      ->required();
  chain_cmd->add_option("--bound", bound, "Cost bound");
  chain_cmd->add_option("--rate", rate, "Demanded rate");
  chain_cmd->callback([&] {
    Topology t = parse_topology(ReadFile(topo_file));
    std::optional<Weight> l, r;
    if (!bound.empty()) l = ParseWeightFlag(bound, "--bound");
    if (!rate.empty()) r = ParseWeightFlag(rate, "--rate");
    BuiltQuery q = chain_query(t, WaypointChain(waypoints, t), src, dst, l, r);
    exit_code = FinishQuery(std::move(q), "chain", common, out, started);
  });

  CLI::App* fair_cmd =
      query_cmd->add_subcommand("fairness", "Max-min fairness check");
  fair_cmd->add_option("--topology", topo_file, "Topology file")->required();
  fair_cmd->add_option("--flows", flows_file, "Flow file")->required();
  fair_cmd->callback([&] {
    exit_code = RunFairness(topo_file, flows_file, common, out, started);
  });

  CLI::App* qos_cmd =
      query_cmd->add_subcommand("qos", "Priority share simulation");
  qos_cmd->add_option("--switch", qos_switch, "Switch name")->required();
  qos_cmd->add_option("--shares", shares_spec, "priority=quota,...")
      ->required();
  qos_cmd->add_option("--packets", packets_spec, "priority:count,...");
  qos_cmd->add_option("--in-port", qos_in, "Ingress port (default in)");
  qos_cmd->add_option("--out-port", qos_out, "Egress port (default out)");
  qos_cmd->add_flag("--queued", queued, "Use the queue-based policy");
  qos_cmd->callback([&] {
    exit_code = RunQos(qos_switch, qos_in, qos_out, shares_spec, packets_spec,
                       queued, common, out, started);
  });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitNotDrop;
  } catch (const CLI::ParseError& e) {
    err << e.get_name() << ": " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return exit_code;
}

}  // namespace cli
}  // namespace wnetkat

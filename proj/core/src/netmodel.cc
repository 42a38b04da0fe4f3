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

#include "wnetkat/netmodel.h"

#include <algorithm>
#include <deque>
#include <map>
#include <stdexcept>
#include <utility>

#include "wnetkat/world.h"

namespace wnetkat {
namespace {

using Kind = Expression::Kind;

// Re-derives the declarations behind an expression built elsewhere: field
// ids carry kind and scope, test/assign values carry symbols, and any
// linear-term name not seen as a field defaults to a quantitative packet
// variable.
void AbsorbExpr(FieldUniverse& u, const Expression& e) {
  switch (e.kind()) {
    case Kind::TestEq:
    case Kind::Assign: {
      const FieldId& f = e.field();
      u.declare(f.name, f.kind, f.scope);
      u.add_symbol(f.name, std::get<std::string>(e.value()));
      return;
    }
    case Kind::QAssign:
    case Kind::QTest: {
      const FieldId& f = e.field();
      u.declare(f.name, f.kind, f.scope);
      for (const auto& [name, coeff] : e.term().coeffs) {
        if (!u.is_declared(name)) {
          u.declare(name, FieldKind::Quantitative, FieldScope::PacketVar);
        }
      }
      return;
    }
    case Kind::Enq:
    case Kind::Deq:
      if (!u.has_queue(e.queue_switch(), e.queue_name())) {
        u.declare_queue(e.queue_switch(), e.queue_name(),
                        FieldUniverse::kDefaultQueueCapacity);
      }
      u.add_symbol("sw", e.queue_switch());
      return;
    case Kind::Not:
    case Kind::Star:
      AbsorbExpr(u, e.body());
      return;
    case Kind::Union:
    case Kind::Seq:
      AbsorbExpr(u, e.left());
      AbsorbExpr(u, e.right());
      return;
    default:
      return;
  }
}

const FieldId& DeclareQuantPacket(FieldUniverse& u, const std::string& name) {
  return u.declare(name, FieldKind::Quantitative, FieldScope::PacketVar);
}

const FieldId& DeclareQuantSwitch(FieldUniverse& u, const std::string& name) {
  return u.declare(name, FieldKind::Quantitative, FieldScope::SwitchVar);
}

Expression AssignConst(const FieldId& f, const Weight& w) {
  return Expression::QAssign(f, LinearTerm::constant_weight(w));
}

Expression TestConst(const FieldId& f, Comparator cmp, const Weight& w) {
  return Expression::QTest(f, cmp, LinearTerm::constant_weight(w));
}

Expression AddConstUpdate(const FieldId& f, const Weight& w) {
  LinearTerm t = LinearTerm::var(f.name);
  t.add_constant(w.finite());
  return Expression::QAssign(f, std::move(t));
}

Expression SwTest(FieldUniverse& u, const std::string& node) {
  u.add_symbol("sw", node);
  return Expression::Test(u.field("sw"), symbol(node));
}

Expression SwAssign(FieldUniverse& u, const std::string& node) {
  u.add_symbol("sw", node);
  return Expression::Assign(u.field("sw"), symbol(node));
}

Expression PtTest(FieldUniverse& u, const std::string& port) {
  u.add_symbol("pt", port);
  return Expression::Test(u.field("pt"), symbol(port));
}

Expression PtAssign(FieldUniverse& u, const std::string& port) {
  u.add_symbol("pt", port);
  return Expression::Assign(u.field("pt"), symbol(port));
}

// Shared skeleton of the reachability queries:
//   src<-A; dst<-B; [init...]; sw<-A; [pre...]; (body...)*; sw=B; [finals...]
Expression ReachSkeleton(FieldUniverse& u, const std::string& A,
                         const std::string& B,
                         std::vector<Expression> init_factors,
                         std::vector<Expression> pre_loop,
                         std::vector<Expression> loop_body,
                         std::vector<Expression> final_factors) {
  u.declare("src", FieldKind::NonQuantitative, FieldScope::PacketVar);
  u.declare("dst", FieldKind::NonQuantitative, FieldScope::PacketVar);
  u.add_symbol("src", A);
  u.add_symbol("dst", B);
  std::vector<Expression> factors;
  factors.push_back(Expression::Assign(u.field("src"), symbol(A)));
  factors.push_back(Expression::Assign(u.field("dst"), symbol(B)));
  for (Expression& f : init_factors) factors.push_back(std::move(f));
  factors.push_back(SwAssign(u, A));
  for (Expression& f : pre_loop) factors.push_back(std::move(f));
  factors.push_back(Expression::Star(NArySeq(loop_body)));
  factors.push_back(SwTest(u, B));
  for (Expression& f : final_factors) factors.push_back(std::move(f));
  return NArySeq(factors);
}

// Unique shortest route by hop count with lexicographic tie-break on the
// (node, port) sequence; the same rule the oracles use.
std::vector<Link> Route(const Topology& t, const std::string& src,
                        const std::string& dst) {
  if (t.nodes.count(src) == 0 || t.nodes.count(dst) == 0) {
    throw std::invalid_argument("flow endpoint outside the topology");
  }
  std::map<std::string, std::vector<Link>> best;
  best[src] = {};
  std::deque<std::string> frontier{src};
  while (!frontier.empty()) {
    std::deque<std::string> next;
    std::map<std::string, std::vector<Link>> found;
    for (const std::string& node : frontier) {
      for (const Link& l : t.links) {
        if (l.u != node || best.count(l.v) != 0) continue;
        std::vector<Link> path = best[node];
        path.push_back(l);
        auto it = found.find(l.v);
        if (it == found.end() || path < it->second) {
          found[l.v] = std::move(path);
        }
      }
    }
    for (auto& [node, path] : found) {
      best[node] = std::move(path);
      next.push_back(node);
    }
    frontier = std::move(next);
  }
  auto it = best.find(dst);
  if (it == best.end()) {
    throw std::invalid_argument("no route from " + src + " to " + dst);
  }
  return it->second;
}

struct MergeRule {
  std::string sw;
  std::string counter_var;      // X, counts not-yet-merged arrivals
  std::string accumulator_var;  // C, sums the arriving quantities
  int fan_in = 0;
};

bool IsDecrementByOne(const LinearTerm& t, const std::string& name) {
  return t.coeffs.size() == 1 && t.coeffs.count(name) != 0 &&
         t.coeffs.at(name) == 1 && t.constant == Rational(-1);
}

bool IsAccumulate(const LinearTerm& t, const std::string& self) {
  return t.coeffs.size() == 2 && t.coeffs.count(self) != 0 &&
         t.coeffs.at(self) == 1 && t.constant == Rational(0);
}

std::vector<MergeRule> FindMergeRules(const Expression& policy) {
  std::vector<MergeRule> rules;
  for (const Expression& alt : UnionAlternatives(policy)) {
    std::optional<std::string> sw;
    std::optional<std::string> counter;
    std::optional<std::string> accumulator;
    int fan_in = 0;
    for (const Expression& f : SeqFactors(alt)) {
      if (f.kind() == Kind::TestEq && f.field().name == "sw") {
        sw = std::get<std::string>(f.value());
      } else if (f.kind() == Kind::QAssign &&
                 IsDecrementByOne(f.term(), f.field().name)) {
        counter = f.field().name;
      } else if (f.kind() == Kind::QAssign &&
                 IsAccumulate(f.term(), f.field().name)) {
        accumulator = f.field().name;
      } else if (f.kind() == Kind::Union) {
        std::vector<Expression> ports = UnionAlternatives(f);
        bool all_pt = !ports.empty();
        for (const Expression& p : ports) {
          all_pt = all_pt && p.kind() == Kind::TestEq &&
                   p.field().name == "pt";
        }
        if (all_pt) fan_in = static_cast<int>(ports.size());
      }
    }
    if (sw.has_value() && counter.has_value() && accumulator.has_value() &&
        fan_in >= 2) {
      rules.push_back(MergeRule{*sw, *counter, *accumulator, fan_in});
    }
  }
  return rules;
}

Verdict PackageReport(const DropReport& r) {
  Verdict v;
  v.outcome = r.outcome;
  v.witness = r.witness;
  v.saturated = r.saturated;
  return v;
}

}  // namespace

int default_fuel(const Topology& t) {
  int n = static_cast<int>(t.nodes.size());
  int m = static_cast<int>(t.links.size());
  return std::max(64, n * m);
}

Expression topology_to_expr(const Topology& t, const TopoRole& role,
                            FieldUniverse& universe) {
  std::optional<FieldId> cost_var, capmin_var, capguard_var;
  if (role.cost_var.has_value()) {
    cost_var = DeclareQuantPacket(universe, *role.cost_var);
  }
  if (role.capmin_var.has_value()) {
    capmin_var = DeclareQuantPacket(universe, *role.capmin_var);
  }
  if (role.capguard_var.has_value()) {
    capguard_var = DeclareQuantPacket(universe, *role.capguard_var);
  }
  std::vector<Expression> hops;
  for (const Link& l : t.links) {
    if (cost_var.has_value() && l.cost.is_infinite()) continue;
    std::vector<Expression> factors;
    factors.push_back(SwTest(universe, l.u));
    factors.push_back(PtTest(universe, l.uport));
    factors.push_back(SwAssign(universe, l.v));
    factors.push_back(PtAssign(universe, l.vport));
    if (cost_var.has_value() && !l.cost.is_zero()) {
      factors.push_back(AddConstUpdate(*cost_var, l.cost));
    }
    if (capmin_var.has_value() && !l.cap.is_infinite()) {
      factors.push_back(DesugarMin(universe, *capmin_var,
                                   LinearTerm::var(capmin_var->name),
                                   LinearTerm::constant_weight(l.cap)));
    }
    if (capguard_var.has_value() && !l.cap.is_infinite()) {
      factors.push_back(TestConst(*capguard_var, Comparator::LE, l.cap));
    }
    hops.push_back(NArySeq(factors));
  }
  if (hops.empty()) return Expression::Drop();
  return NAryUnion(hops);
}

Expression flood_policy(const Topology& t, FieldUniverse& universe) {
  std::set<std::string> ports;
  for (const Link& l : t.links) ports.insert(l.uport);
  std::vector<Expression> alts;
  for (const std::string& p : ports) alts.push_back(PtAssign(universe, p));
  return NAryUnion(alts);
}

BuiltQuery cost_reach_query(const Topology& t, const Expression& policy,
                            const std::string& A, const std::string& B,
                            const Weight& c) {
  BuiltQuery q;
  AbsorbExpr(q.universe, policy);
  const FieldId& l = DeclareQuantPacket(q.universe, "l");
  Expression topo = topology_to_expr(t, TopoRole::Cost("l"), q.universe);
  std::vector<Expression> init;
  init.push_back(AssignConst(l, Weight::integer(0)));
  std::vector<Expression> body{Expression::Dup(), policy, topo};
  std::vector<Expression> finals;
  if (!c.is_infinite()) {
    // The in-loop copy prunes over-budget branches so positive-cost cycles
    // cannot defeat saturation.
    body.push_back(TestConst(l, Comparator::LE, c));
    finals.push_back(TestConst(l, Comparator::LE, c));
  }
  q.expr = ReachSkeleton(q.universe, A, B, std::move(init), {},
                         std::move(body), std::move(finals));
  q.suggested_fuel = default_fuel(t);
  return q;
}

BuiltQuery cap_reach_query(const Topology& t, const Expression& policy,
                           const std::string& A, const std::string& B,
                           const Weight& r, CapMode mode) {
  if (r.is_infinite()) {
    throw std::invalid_argument("capacity demand must be finite");
  }
  BuiltQuery q;
  AbsorbExpr(q.universe, policy);
  const FieldId& c = DeclareQuantPacket(q.universe, "c");
  std::vector<Expression> init;
  init.push_back(AssignConst(c, r));
  std::vector<Expression> pre;
  std::vector<Expression> body;
  std::vector<Expression> finals;
  switch (mode) {
    case CapMode::UnsplitMin: {
      body = {policy, topology_to_expr(t, TopoRole::CapMin("c"), q.universe)};
      finals.push_back(TestConst(c, Comparator::GE, r));
      break;
    }
    case CapMode::UnsplitGuard: {
      body = {policy,
              topology_to_expr(t, TopoRole::CapGuard("c"), q.universe)};
      break;
    }
    case CapMode::Split: {
      std::vector<MergeRule> rules = FindMergeRules(policy);
      if (rules.empty()) {
        throw std::invalid_argument(
            "split mode needs merge rules (fan-in counter updates) in the "
            "policy");
      }
      std::vector<Expression> init_split;
      for (const MergeRule& m : rules) {
        const FieldId& x = q.universe.field(m.counter_var);
        init_split.push_back(SwAssign(q.universe, m.sw));
        init_split.push_back(AssignConst(x, Weight::integer(m.fan_in)));
        init_split.push_back(AssignConst(q.universe.field(m.accumulator_var),
                                         Weight::integer(0)));
        if (m.sw == B) {
          finals.push_back(TestConst(x, Comparator::EQ, Weight::integer(0)));
        }
      }
      for (Expression& f : init) init_split.push_back(std::move(f));
      init = std::move(init_split);
      // The fork semantics duplicate whatever follows a star, so the merge
      // rules must run inside one body iteration. Starting with policy and
      // looping (topo; policy) applies each rule exactly once per visit and
      // lets a packet finishing a merge take the star exit directly.
      pre = {policy};
      body = {topology_to_expr(t, TopoRole::Plain(), q.universe), policy};
      finals.push_back(TestConst(c, Comparator::GE, r));
      q.mode = EvalMode::SharedState;
      break;
    }
  }
  q.expr = ReachSkeleton(q.universe, A, B, std::move(init), std::move(pre),
                         std::move(body), std::move(finals));
  q.suggested_fuel = default_fuel(t);
  return q;
}

BuiltQuery chain_query(const Topology& t,
                       const std::vector<ChainFunction>& chain,
                       const std::string& A, const std::string& B,
                       const std::optional<Weight>& l,
                       const std::optional<Weight>& r) {
  bool with_cost = l.has_value() && !l->is_infinite();
  bool with_cap = r.has_value() && !r->is_infinite();
  BuiltQuery q;
  TopoRole role;
  std::vector<Expression> init;
  if (with_cost) {
    role.cost_var = "co";
    init.push_back(
        AssignConst(DeclareQuantPacket(q.universe, "co"), Weight::integer(0)));
  }
  if (with_cap) {
    role.capmin_var = "ca";
    init.push_back(AssignConst(DeclareQuantPacket(q.universe, "ca"), *r));
  }
  Expression topo = topology_to_expr(t, role, q.universe);
  // Travel explores every port; the per-hop dup records the path.
  std::vector<Expression> body{Expression::Dup(),
                               flood_policy(t, q.universe), topo};
  if (with_cost) {
    body.push_back(TestConst(q.universe.field("co"), Comparator::LE, *l));
  }
  Expression travel = Expression::Star(NArySeq(body));

  q.universe.declare("src", FieldKind::NonQuantitative, FieldScope::PacketVar);
  q.universe.declare("dst", FieldKind::NonQuantitative, FieldScope::PacketVar);
  q.universe.add_symbol("src", A);
  q.universe.add_symbol("dst", B);
  std::vector<Expression> factors;
  factors.push_back(Expression::Assign(q.universe.field("src"), symbol(A)));
  factors.push_back(Expression::Assign(q.universe.field("dst"), symbol(B)));
  for (Expression& f : init) factors.push_back(std::move(f));
  factors.push_back(SwAssign(q.universe, A));
  factors.push_back(travel);
  for (const ChainFunction& fn : chain) {
    std::vector<Expression> hops;
    for (const std::string& inst : fn.instances) {
      if (t.nodes.count(inst) != 0) hops.push_back(SwTest(q.universe, inst));
    }
    if (hops.empty()) {
      throw std::invalid_argument("chain function '" + fn.name +
                                  "' has no instance in the topology");
    }
    factors.push_back(NAryUnion(hops));
    if (with_cap) {
      const FieldId& ca = q.universe.field("ca");
      switch (fn.effect) {
        case ChainFunction::Effect::Conserve:
          break;
        case ChainFunction::Effect::AddConst:
          factors.push_back(AddConstUpdate(ca, fn.add_gamma));
          break;
        case ChainFunction::Effect::MulFactor: {
          LinearTerm scaled;
          scaled.add_var(ca.name, fn.mul_factor);
          factors.push_back(Expression::QAssign(ca, std::move(scaled)));
          break;
        }
      }
    }
    factors.push_back(travel);
  }
  factors.push_back(SwTest(q.universe, B));
  if (with_cost) {
    factors.push_back(TestConst(q.universe.field("co"), Comparator::LE, *l));
  }
  if (with_cap) {
    factors.push_back(TestConst(q.universe.field("ca"), Comparator::GE, *r));
  }
  q.expr = NArySeq(factors);
  q.suggested_fuel = default_fuel(t);
  return q;
}

BuiltQuery fairness_query(const Topology& t, const FlowSet& flows,
                          std::size_t sorted_index) {
  std::vector<Flow> sorted = flows.flows;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const Flow& a, const Flow& b) { return a.rate < b.rate; });
  if (sorted_index >= sorted.size()) {
    throw std::invalid_argument("flow index out of range");
  }
  for (const Flow& f : sorted) {
    if (f.rate.is_infinite() || f.rate.is_zero()) {
      throw std::invalid_argument("flow rates must be finite and positive");
    }
  }
  std::vector<std::vector<Link>> paths;
  paths.reserve(sorted.size());
  for (const Flow& f : sorted) paths.push_back(Route(t, f.src, f.dst));

  std::optional<Weight> max_cap;
  for (const Link& l : t.links) {
    if (l.cap.is_infinite()) continue;
    if (!max_cap.has_value() || l.cap > *max_cap) max_cap = l.cap;
  }
  if (!max_cap.has_value()) {
    throw std::invalid_argument(
        "fairness needs at least one finite link capacity");
  }

  const std::size_t i = sorted_index;
  BuiltQuery q;
  std::vector<FieldId> xs;
  for (std::size_t j = 0; j < sorted.size(); ++j) {
    xs.push_back(
        DeclareQuantPacket(q.universe, "x" + std::to_string(j + 1)));
  }
  const FieldId& a = DeclareQuantPacket(q.universe, "a");
  Expression topo = topology_to_expr(t, TopoRole::Plain(), q.universe);

  std::vector<Expression> factors;
  // Verified smaller rates stay fixed; unverified larger ones are zeroed so
  // only the equal-share term below accounts for them.
  for (std::size_t j = 0; j < sorted.size(); ++j) {
    factors.push_back(
        AssignConst(xs[j], j <= i ? sorted[j].rate : Weight::integer(0)));
  }
  factors.push_back(AssignConst(a, *max_cap));
  factors.push_back(SwAssign(q.universe, sorted[i].src));

  std::vector<Expression> hops;
  for (const Link& link : paths[i]) {
    std::vector<Expression> hop;
    hop.push_back(SwTest(q.universe, link.u));
    if (!link.cap.is_infinite()) {
      // a <- min{a, cap - sum(fixed sharers) - (k-1) * own rate}, k counting
      // the unverified flows on the link including this one.
      LinearTerm bound = LinearTerm::constant_weight(link.cap);
      int k = 0;
      for (std::size_t j = 0; j < sorted.size(); ++j) {
        bool shares = std::find(paths[j].begin(), paths[j].end(), link) !=
                      paths[j].end();
        if (!shares) continue;
        if (j < i) {
          bound.add_var(xs[j].name, -1);
        } else {
          ++k;
        }
      }
      if (k > 1) bound.add_var(xs[i].name, -(k - 1));
      hop.push_back(
          AssignMin(q.universe, a, {LinearTerm::var(a.name), bound}));
    }
    hop.push_back(PtAssign(q.universe, link.uport));
    hops.push_back(NArySeq(hop));
  }
  factors.push_back(Expression::Star(
      NArySeq({Expression::Dup(), NAryUnion(hops), topo})));
  factors.push_back(SwTest(q.universe, sorted[i].dst));
  factors.push_back(
      Expression::QTest(xs[i], Comparator::EQ, LinearTerm::var(a.name)));
  q.expr = NArySeq(factors);
  q.suggested_fuel = default_fuel(t);
  return q;
}

std::vector<std::pair<Flow, Verdict>> fairness_check(const Topology& t,
                                                     const FlowSet& flows) {
  std::vector<Flow> sorted = flows.flows;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const Flow& a, const Flow& b) { return a.rate < b.rate; });
  std::vector<std::pair<Flow, Verdict>> out;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    out.emplace_back(sorted[i], run_query(fairness_query(t, flows, i)));
  }
  return out;
}

Expression qos_policy(const std::string& sw,
                      const std::vector<std::string>& in_ports,
                      const std::string& out_port,
                      const std::vector<std::pair<std::string, int>>& shares,
                      FieldUniverse& universe) {
  universe.declare("x", FieldKind::NonQuantitative, FieldScope::PacketVar);
  std::set<std::string> seen;
  std::vector<FieldId> counters;
  for (const auto& [prio, quota] : shares) {
    if (!seen.insert(prio).second) {
      throw std::invalid_argument("duplicate priority symbol '" + prio + "'");
    }
    if (quota < 1) throw std::invalid_argument("quotas must be at least 1");
    universe.add_symbol("x", prio);
    counters.push_back(DeclareQuantSwitch(universe, "C_" + prio));
  }

  auto forward_branch = [&](std::size_t p) {
    return NArySeq({Expression::Test(universe.field("x"),
                                     symbol(shares[p].first)),
                    TestConst(counters[p], Comparator::LT,
                              Weight::integer(shares[p].second)),
                    PtAssign(universe, out_port),
                    AddConstUpdate(counters[p], Weight::integer(1))});
  };
  std::vector<Expression> branches;
  for (std::size_t p = 0; p < shares.size(); ++p) {
    branches.push_back(forward_branch(p));
  }
  // Reset: every counter at quota, zero all. The round-completing packet was
  // already forwarded by its forward branch; its reset copy only opens the
  // next round. Re-entering the forward branches here would forward that
  // packet a second time.
  std::vector<Expression> reset;
  for (std::size_t p = 0; p < shares.size(); ++p) {
    reset.push_back(TestConst(counters[p], Comparator::EQ,
                              Weight::integer(shares[p].second)));
  }
  for (std::size_t p = 0; p < shares.size(); ++p) {
    reset.push_back(AssignConst(counters[p], Weight::integer(0)));
  }
  branches.push_back(NArySeq(reset));

  std::vector<Expression> factors;
  factors.push_back(SwTest(universe, sw));
  if (!in_ports.empty()) {
    std::vector<Expression> ports;
    for (const std::string& p : in_ports) ports.push_back(PtTest(universe, p));
    factors.push_back(NAryUnion(ports));
  }
  factors.push_back(NAryUnion(branches));
  return NArySeq(factors);
}

Expression qos_queue_policy(
    const std::string& sw, const std::string& out_port,
    const std::vector<std::pair<std::string, int>>& shares,
    FieldUniverse& universe) {
  universe.declare("x", FieldKind::NonQuantitative, FieldScope::PacketVar);
  universe.add_symbol("sw", sw);
  std::set<std::string> seen;
  std::vector<FieldId> counters;
  std::vector<FieldId> occupancy;
  std::vector<std::string> queues;
  for (const auto& [prio, quota] : shares) {
    if (!seen.insert(prio).second) {
      throw std::invalid_argument("duplicate priority symbol '" + prio + "'");
    }
    if (quota < 1) throw std::invalid_argument("quotas must be at least 1");
    universe.add_symbol("x", prio);
    counters.push_back(DeclareQuantSwitch(universe, "C_" + prio));
    occupancy.push_back(DeclareQuantSwitch(universe, "n_" + prio));
    queues.push_back("q_" + prio);
    if (!universe.has_queue(sw, queues.back())) {
      throw std::invalid_argument("queue '" + queues.back() + "' at '" + sw +
                                  "' is not declared");
    }
  }

  auto x_is = [&](std::size_t p) {
    return Expression::Test(universe.field("x"), symbol(shares[p].first));
  };
  std::vector<Expression> enq;
  for (std::size_t p = 0; p < shares.size(); ++p) {
    enq.push_back(NArySeq({x_is(p), Expression::Enq(sw, queues[p]),
                           AddConstUpdate(occupancy[p], Weight::integer(1))}));
  }

  auto pop = [&](std::size_t p) {
    LinearTerm down = LinearTerm::var(occupancy[p].name);
    down.add_constant(Rational(-1));
    return std::vector<Expression>{
        Expression::Deq(sw, queues[p]),
        Expression::QAssign(occupancy[p], std::move(down)),
        PtAssign(universe, out_port)};
  };
  std::vector<Expression> deq;
  for (std::size_t p = 0; p < shares.size(); ++p) {
    // Work-conserving borrow: quota reached but every other queue is empty.
    // Listed before the under-quota branch: branch copies of one packet run
    // in order against the shared counters, and the under branch can push
    // C_p onto the quota boundary; evaluating borrow first keeps the two
    // guards exclusive for the same packet.
    std::vector<Expression> borrow{
        x_is(p), TestConst(counters[p], Comparator::GE,
                           Weight::integer(shares[p].second))};
    for (std::size_t o = 0; o < shares.size(); ++o) {
      if (o == p) continue;
      borrow.push_back(
          TestConst(occupancy[o], Comparator::EQ, Weight::integer(0)));
    }
    for (Expression& e : pop(p)) borrow.push_back(std::move(e));
    deq.push_back(NArySeq(borrow));
    // Under quota: consume the share and dequeue.
    std::vector<Expression> under{
        x_is(p), TestConst(counters[p], Comparator::LT,
                           Weight::integer(shares[p].second))};
    for (Expression& e : pop(p)) under.push_back(std::move(e));
    under.push_back(AddConstUpdate(counters[p], Weight::integer(1)));
    deq.push_back(NArySeq(under));
  }
  // Reset once every quota is spent; the packet retries on the next pass.
  std::vector<Expression> reset;
  for (std::size_t p = 0; p < shares.size(); ++p) {
    reset.push_back(TestConst(counters[p], Comparator::EQ,
                              Weight::integer(shares[p].second)));
  }
  for (std::size_t p = 0; p < shares.size(); ++p) {
    reset.push_back(AssignConst(counters[p], Weight::integer(0)));
  }
  deq.push_back(NArySeq(reset));

  return NArySeq({SwTest(universe, sw), NAryUnion(enq), NAryUnion(deq)});
}

Verdict run_query(const BuiltQuery& q) {
  EvalConfig cfg{q.suggested_fuel, q.mode};
  std::vector<World> inputs = q.seeds;
  if (inputs.empty()) inputs.push_back(initial_world(q.universe));
  if (q.mode == EvalMode::SharedState) {
    EvalResult r = run_shared(q.expr, inputs, q.universe, cfg);
    Verdict v;
    v.saturated = r.saturated;
    if (!r.worlds.empty()) {
      v.outcome = DropOutcome::NotDrop;
      v.witness = *r.worlds.begin();
    } else {
      v.outcome = r.saturated ? DropOutcome::IsDrop : DropOutcome::Unknown;
    }
    return v;
  }
  return PackageReport(drop_check(q.expr, inputs, q.universe, cfg));
}

std::vector<std::string> witness_path(const World& w,
                                      const FieldUniverse& universe) {
  std::vector<std::string> path;
  for (auto it = w.history.rbegin(); it != w.history.rend(); ++it) {
    path.push_back(std::get<std::string>(it->fields.at("sw")));
  }
  (void)universe;
  return path;
}

}  // namespace wnetkat

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

#ifndef WNETKAT_NETMODEL_H_
#define WNETKAT_NETMODEL_H_

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "wnetkat/evaluator.h"
#include "wnetkat/expr.h"
#include "wnetkat/field.h"
#include "wnetkat/weight.h"

namespace wnetkat {

// One directed link. Undirected input expands to two of these.
struct Link {
  std::string u;
  std::string uport;
  std::string v;
  std::string vport;
  Weight cost = Weight::integer(1);
  Weight cap = Weight::infinity();

  friend auto operator<=>(const Link&, const Link&) = default;
};

struct QueueDecl {
  std::string sw;
  std::string name;
  std::size_t capacity = FieldUniverse::kDefaultQueueCapacity;

  friend auto operator<=>(const QueueDecl&, const QueueDecl&) = default;
};

// Weighted directed graph plus declared per-switch queues.
// Invariant: (node, port) endpoint pairs are unique; weights nonnegative.
struct Topology {
  std::set<std::string> nodes;
  std::vector<Link> links;
  std::vector<QueueDecl> queues;
};

struct Flow {
  std::string src;
  std::string dst;
  Weight rate = Weight::integer(1);

  friend auto operator<=>(const Flow&, const Flow&) = default;
};

// Ordered; rates must be finite and positive.
struct FlowSet {
  std::vector<Flow> flows;
};

// A chain waypoint: any instance switch satisfies the hop, and traversing
// it applies the rate effect to the bandwidth variable.
struct ChainFunction {
  enum class Effect { Conserve, AddConst, MulFactor };

  std::string name;
  std::set<std::string> instances;
  Effect effect = Effect::Conserve;
  Weight add_gamma = Weight::integer(0);  // Effect::AddConst
  std::int64_t mul_factor = 1;            // Effect::MulFactor
};

struct Verdict {
  DropOutcome outcome = DropOutcome::Unknown;
  std::optional<World> witness;  // present iff outcome == NotDrop
  std::optional<Weight> bound_value;
  bool saturated = true;
};

// A query expression together with everything needed to run it.
struct BuiltQuery {
  Expression expr;
  FieldUniverse universe;
  EvalMode mode = EvalMode::PerWorld;
  int suggested_fuel = 64;
  // Seeds beyond the single initial world (SharedState queries).
  std::vector<World> seeds;
};

// Which weight atoms the per-link expression carries. Any subset may be
// active; all absent means plain forwarding.
struct TopoRole {
  // l <- l + cost per link (infinite-cost links are omitted).
  std::optional<std::string> cost_var;
  // c <- min{c, cap} per link (omitted for infinite capacity).
  std::optional<std::string> capmin_var;
  // c <= cap test per link (omitted for infinite capacity).
  std::optional<std::string> capguard_var;

  static TopoRole Plain() { return {}; }
  static TopoRole Cost(std::string var) {
    return {.cost_var = std::move(var)};
  }
  static TopoRole CapMin(std::string var) {
    return {.capmin_var = std::move(var)};
  }
  static TopoRole CapGuard(std::string var) {
    return {.capguard_var = std::move(var)};
  }
};

// Declares sw/pt symbols and the role variables into universe, then returns
// the union over directed links of
//   sw=u; pt=uport; sw<-v; pt<-vport; [weight atoms per role].
// An empty topology yields drop.
Expression topology_to_expr(const Topology& t, const TopoRole& role,
                            FieldUniverse& universe);

// The exploring policy: a union of pt<-p over every source port in t. Used
// as the default policy of the reachability queries and inside chain travel
// segments.
Expression flood_policy(const Topology& t, FieldUniverse& universe);

// src<-A; dst<-B; l<-0; sw<-A; (dup; policy; topo_cost; l<=c)*; sw=B; l<=c.
// The in-loop bound test prunes, so acyclic-cost saturation is reachable;
// the star admits the zero-hop path for A == B.
BuiltQuery cost_reach_query(const Topology& t, const Expression& policy,
                            const std::string& A, const std::string& B,
                            const Weight& c);

enum class CapMode { UnsplitMin, UnsplitGuard, Split };

// UnsplitMin:  src<-A;dst<-B;c<-r;sw<-A;(policy;topo_capmin)*;sw=B;c>=r.
// UnsplitGuard: same with per-link c<=cap tests and no final c test.
// Split: src<-A;dst<-B;[per-merge sw<-m;X<-k;C<-0];c<-r;sw<-A;
// policy;(topo;policy)*;sw=B;[X=0 per merge at B];c>=r, run in SharedState
// mode; looping policy last applies each merge rule exactly once per visit,
// so the packet completing a merge exits the star directly. The policy must
// contain merge rules (X and C switch-counter updates), which are detected
// and pre-initialized per merge switch. Throws std::invalid_argument for
// Split without merge rules.
BuiltQuery cap_reach_query(const Topology& t, const Expression& policy,
                           const std::string& A, const std::string& B,
                           const Weight& r, CapMode mode);

// Waypointed travel: prefix; (travel)*; sw=F1; effect; (travel)*; ...;
// sw=B; [co<=l]; [ca>=r]. Travel carries cost and/or capacity atoms
// depending on which bounds are requested.
BuiltQuery chain_query(const Topology& t,
                       const std::vector<ChainFunction>& chain,
                       const std::string& A, const std::string& B,
                       const std::optional<Weight>& l,
                       const std::optional<Weight>& r);

// Max-min fairness check: flows sorted by rate ascending; the i-th test
// fixes the already-verified smaller rates, zeroes the larger ones, and
// min-folds per shared link the equal-share bound
//   a <- min{a, cap - sum(fixed rates on the link) - (k-1) * x_i}
// where k counts the not-yet-verified flows on the link including i. The
// final test x_i = a holds exactly when x_i equals the progressive-filling
// share. Returns one verdict per flow in the sorted order.
std::vector<std::pair<Flow, Verdict>> fairness_check(const Topology& t,
                                                     const FlowSet& flows);

// Builds the fairness test expression for one flow (exposed for tests).
BuiltQuery fairness_query(const Topology& t, const FlowSet& flows,
                          std::size_t sorted_index);

// Counter-based priority shares: per priority p the branch
//   x=p; C_p<quota_p; pt<-out; C_p<-C_p+1
// plus a reset branch requiring every counter at its quota and zeroing all,
// which opens the next round (the round-completing packet was already
// forwarded by its forward branch). SharedState mode; counters live at sw.
// Throws std::invalid_argument on duplicate priority symbols.
Expression qos_policy(const std::string& sw,
                      const std::vector<std::string>& in_ports,
                      const std::string& out_port,
                      const std::vector<std::pair<std::string, int>>& shares,
                      FieldUniverse& universe);

// Queue-based variant: an enqueue stage routes packets into per-priority
// queues, and the dequeue stage forwards under quota, borrows the other
// queues' share when they are empty (occupancy counters n_p stand in for
// emptiness tests), and resets when every quota is reached. Throws
// std::invalid_argument unless a queue named q_<priority> at sw is declared.
Expression qos_queue_policy(
    const std::string& sw, const std::string& out_port,
    const std::vector<std::pair<std::string, int>>& shares,
    FieldUniverse& universe);

// Runs the query in its required mode and packages the drop report.
Verdict run_query(const BuiltQuery& q);

// The switch sequence of the witness history, oldest hop first.
std::vector<std::string> witness_path(const World& w,
                                      const FieldUniverse& universe);

// Fuel heuristic used by query builders: |links| * |nodes|, at least 64.
int default_fuel(const Topology& t);

}  // namespace wnetkat

#endif  // WNETKAT_NETMODEL_H_

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

#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gtest/gtest.h"
#include "oracles.h"
#include "wnetkat/evaluator.h"
#include "wnetkat/parser.h"
#include "wnetkat/world.h"

namespace wnetkat {
namespace {

using testing::ChainFeasible;
using testing::MaxMinShares;
using testing::QosForwarded;
using testing::QosQueueForwarded;
using testing::RandomTopology;
using testing::ShortestCost;
using testing::SplitDelivered;
using testing::WidestBottleneck;

std::string ReadAsset(const std::string& name) {
  std::ifstream in(std::string(WNETKAT_ASSET_DIR) + "/" + name);
  EXPECT_TRUE(in.good()) << name;
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

Topology TinyTopology() {
  Topology t;
  t.nodes = {"A", "B"};
  t.links.push_back(
      {"A", "1", "B", "2", Weight::integer(3), Weight::integer(5)});
  return t;
}

World At(const FieldUniverse& u, const std::string& sw,
         const std::string& pt) {
  World w = initial_world(u);
  packet_write(w, u, "sw", symbol(sw));
  packet_write(w, u, "pt", symbol(pt));
  return w;
}

TEST(TopologyToExprTest, PlainForwardsAlongLinks) {
  FieldUniverse u;
  Expression e = topology_to_expr(TinyTopology(), TopoRole::Plain(), u);
  const EvalResult r = evaluate(e, At(u, "A", "1"), u, EvalConfig{});
  ASSERT_EQ(r.worlds.size(), 1u);
  EXPECT_EQ(std::get<std::string>(packet_read(*r.worlds.begin(), u, "sw")),
            "B");
  EXPECT_EQ(std::get<std::string>(packet_read(*r.worlds.begin(), u, "pt")),
            "2");
  EXPECT_TRUE(evaluate(e, At(u, "B", "2"), u, EvalConfig{}).worlds.empty());
}

TEST(TopologyToExprTest, EmptyTopologyIsDrop) {
  FieldUniverse u;
  EXPECT_EQ(topology_to_expr(Topology{}, TopoRole::Plain(), u),
            Expression::Drop());
}

TEST(TopologyToExprTest, CostRoleAccumulatesAndSkipsInfiniteLinks) {
  Topology t = TinyTopology();
  t.nodes.insert("C");
  t.links.push_back(
      {"B", "9", "C", "9", Weight::infinity(), Weight::integer(5)});
  FieldUniverse u;
  Expression e = topology_to_expr(t, TopoRole::Cost("l"), u);

  const EvalResult r = evaluate(e, At(u, "A", "1"), u, EvalConfig{});
  ASSERT_EQ(r.worlds.size(), 1u);
  EXPECT_EQ(std::get<Weight>(packet_read(*r.worlds.begin(), u, "l")),
            Weight::integer(3));
  // The infinite-cost link contributes no alternative at all.
  EXPECT_TRUE(evaluate(e, At(u, "B", "9"), u, EvalConfig{}).worlds.empty());
}

TEST(TopologyToExprTest, CapacityRoles) {
  FieldUniverse u;
  Expression clamp = topology_to_expr(TinyTopology(), TopoRole::CapMin("c"), u);
  World w = At(u, "A", "1");
  packet_write(w, u, "c", quantity(Weight::integer(9)));
  const EvalResult r = evaluate(clamp, w, u, EvalConfig{});
  ASSERT_EQ(r.worlds.size(), 1u);
  EXPECT_EQ(std::get<Weight>(packet_read(*r.worlds.begin(), u, "c")),
            Weight::integer(5));

  FieldUniverse u2;
  Expression guard =
      topology_to_expr(TinyTopology(), TopoRole::CapGuard("c"), u2);
  World ok = At(u2, "A", "1");
  packet_write(ok, u2, "c", quantity(Weight::integer(4)));
  EXPECT_EQ(evaluate(guard, ok, u2, EvalConfig{}).worlds.size(), 1u);
  World over = At(u2, "A", "1");
  packet_write(over, u2, "c", quantity(Weight::integer(6)));
  EXPECT_TRUE(evaluate(guard, over, u2, EvalConfig{}).worlds.empty());
}

TEST(FloodPolicyTest, OpensEverySourcePort) {
  Topology t = TinyTopology();
  t.links.push_back(
      {"B", "7", "A", "8", Weight::integer(1), Weight::integer(1)});
  FieldUniverse u;
  Expression e = flood_policy(t, u);
  const EvalResult r = evaluate(e, At(u, "A", "1"), u, EvalConfig{});
  std::set<std::string> ports;
  for (const World& w : r.worlds) {
    ports.insert(std::get<std::string>(packet_read(w, u, "pt")));
  }
  EXPECT_EQ(ports, (std::set<std::string>{"1", "7"}));
}

TEST(DefaultFuelTest, ScalesWithTopologySize) {
  EXPECT_EQ(default_fuel(TinyTopology()), 64);
  Topology b4 = parse_topology(ReadAsset("b4.top"));
  EXPECT_EQ(b4.nodes.size(), 6u);
  EXPECT_EQ(b4.links.size(), 18u);
  EXPECT_EQ(default_fuel(b4), 108);
}

// ---------------------------------------------------------------------------
// Cost reachability.

void ExpectCostVerdicts(const Topology& t, const std::string& src,
                        const std::string& dst) {
  FieldUniverse fu;
  const Expression policy = flood_policy(t, fu);
  const Weight best = ShortestCost(t, src, dst);
  if (best.is_infinite()) {
    Verdict v = run_query(cost_reach_query(t, policy, src, dst,
                                           Weight::integer(1000)));
    EXPECT_EQ(v.outcome, DropOutcome::IsDrop) << src << "->" << dst;
    return;
  }
  Verdict hit = run_query(cost_reach_query(t, policy, src, dst, best));
  ASSERT_EQ(hit.outcome, DropOutcome::NotDrop) << src << "->" << dst;
  ASSERT_TRUE(hit.witness.has_value());

  const BuiltQuery q = cost_reach_query(t, policy, src, dst, best);
  std::vector<std::string> path = witness_path(*hit.witness, q.universe);
  ASSERT_FALSE(path.empty());
  EXPECT_EQ(path.front(), src);
  EXPECT_EQ(path.back(), dst);
  Weight total = Weight::integer(0);
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    Weight hop = Weight::infinity();
    for (const Link& l : t.links) {
      if (l.u == path[i] && l.v == path[i + 1]) hop = hop.min(l.cost);
    }
    ASSERT_FALSE(hop.is_infinite()) << path[i] << "->" << path[i + 1];
    total = total.plus(hop);
  }
  EXPECT_EQ(total, best);

  if (!(best == Weight::integer(0))) {
    Weight under = best.monus(Weight::ratio(1, 2));
    Verdict miss = run_query(cost_reach_query(t, policy, src, dst, under));
    EXPECT_EQ(miss.outcome, DropOutcome::IsDrop) << src << "->" << dst;
  }
}

TEST(CostReachTest, MatchesDijkstraOnB4) {
  Topology t = parse_topology(ReadAsset("b4.top"));
  EXPECT_EQ(ShortestCost(t, "dc1", "dc5"), Weight::integer(7));
  ExpectCostVerdicts(t, "dc1", "dc5");
  ExpectCostVerdicts(t, "dc3", "dc6");
  ExpectCostVerdicts(t, "dc1", "dc1");
}

TEST(CostReachTest, MatchesDijkstraOnRandomTopologies) {
  std::mt19937 rng(7);
  for (int i = 0; i < 8; ++i) {
    Topology t = RandomTopology(rng, 5, 2);
    ExpectCostVerdicts(t, "n0", "n4");
    ExpectCostVerdicts(t, "n3", "n1");
  }
}

TEST(CostReachTest, UnreachableDestinationIsDrop) {
  Topology t;
  t.nodes = {"A", "B"};
  FieldUniverse fu;
  const Expression policy = flood_policy(t, fu);
  Verdict v =
      run_query(cost_reach_query(t, policy, "A", "B", Weight::integer(50)));
  EXPECT_EQ(v.outcome, DropOutcome::IsDrop);
  Verdict self =
      run_query(cost_reach_query(t, policy, "A", "A", Weight::integer(0)));
  EXPECT_EQ(self.outcome, DropOutcome::NotDrop);
}

TEST(CostReachTest, UnknownEndpointsAreSimplyUnreachable) {
  Topology t = TinyTopology();
  FieldUniverse fu;
  const Expression policy = flood_policy(t, fu);
  Verdict v = run_query(
      cost_reach_query(t, policy, "nope", "B", Weight::integer(50)));
  EXPECT_EQ(v.outcome, DropOutcome::IsDrop);
}

// ---------------------------------------------------------------------------
// Capacity reachability.

void ExpectCapVerdicts(const Topology& t, const std::string& src,
                       const std::string& dst) {
  FieldUniverse fu;
  const Expression policy = flood_policy(t, fu);
  const Weight width = WidestBottleneck(t, src, dst);
  for (CapMode mode : {CapMode::UnsplitMin, CapMode::UnsplitGuard}) {
    if (!(width == Weight::integer(0))) {
      Verdict fit = run_query(cap_reach_query(t, policy, src, dst, width,
                                              mode));
      EXPECT_EQ(fit.outcome, DropOutcome::NotDrop) << src << "->" << dst;
    }
    if (!width.is_infinite()) {
      Verdict over = run_query(cap_reach_query(
          t, policy, src, dst, width.plus(Weight::integer(1)), mode));
      EXPECT_EQ(over.outcome, DropOutcome::IsDrop) << src << "->" << dst;
    }
  }
}

TEST(CapReachTest, MatchesWidestPathOnB4) {
  Topology t = parse_topology(ReadAsset("b4.top"));
  EXPECT_EQ(WidestBottleneck(t, "dc1", "dc5"), Weight::integer(6));
  ExpectCapVerdicts(t, "dc1", "dc5");
  ExpectCapVerdicts(t, "dc3", "dc6");
}

TEST(CapReachTest, MatchesWidestPathOnRandomTopologies) {
  std::mt19937 rng(21);
  for (int i = 0; i < 8; ++i) {
    Topology t = RandomTopology(rng, 5, 2);
    ExpectCapVerdicts(t, "n0", "n4");
    ExpectCapVerdicts(t, "n2", "n3");
  }
}

TEST(CapReachTest, SplitRequiresMergeRules) {
  Topology t = parse_topology(ReadAsset("b4.top"));
  FieldUniverse fu;
  const Expression policy = flood_policy(t, fu);
  EXPECT_THROW(cap_reach_query(t, policy, "dc1", "dc5", Weight::integer(2),
                               CapMode::Split),
               std::invalid_argument);
}

TEST(CapReachTest, SplitMergeDeliversUpToTen) {
  Topology t = parse_topology(ReadAsset("b4.top"));
  const Expression policy = parse_expr(ReadAsset("b4_split.wnk")).expr;
  for (int rate = 1; rate <= 12; ++rate) {
    const Weight r = Weight::integer(rate);
    const bool feasible = !(SplitDelivered(r) < r);
    Verdict v =
        run_query(cap_reach_query(t, policy, "dc1", "dc5", r, CapMode::Split));
    EXPECT_EQ(v.outcome,
              feasible ? DropOutcome::NotDrop : DropOutcome::IsDrop)
        << "rate " << rate;
    if (feasible) {
      ASSERT_TRUE(v.witness.has_value());
      const BuiltQuery q =
          cap_reach_query(t, policy, "dc1", "dc5", r, CapMode::Split);
      EXPECT_EQ(std::get<Weight>(packet_read(*v.witness, q.universe, "c")),
                r)
          << "rate " << rate;
    }
  }
}

// ---------------------------------------------------------------------------
// Service chains.

std::vector<ChainFunction> Fig1Chain() {
  ChainFunction f1;
  f1.name = "F1";
  f1.instances = {"F1"};
  ChainFunction f2;
  f2.name = "F2";
  f2.instances = {"F2_1", "F2_2"};
  return {f1, f2};
}

TEST(ChainTest, WorkedExampleBounds) {
  Topology t = parse_topology(ReadAsset("fig1.top"));
  const std::vector<ChainFunction> chain = Fig1Chain();
  const std::optional<Weight> l4 = Weight::integer(4);
  const std::optional<Weight> l3 = Weight::integer(3);
  const std::optional<Weight> r4 = Weight::integer(4);

  EXPECT_TRUE(ChainFeasible(t, chain, "s", "t", l4, r4));
  Verdict ok = run_query(chain_query(t, chain, "s", "t", l4, r4));
  ASSERT_EQ(ok.outcome, DropOutcome::NotDrop);
  ASSERT_TRUE(ok.witness.has_value());

  EXPECT_FALSE(ChainFeasible(t, chain, "s", "t", l3, r4));
  Verdict tight = run_query(chain_query(t, chain, "s", "t", l3, r4));
  EXPECT_EQ(tight.outcome, DropOutcome::IsDrop);
}

TEST(ChainTest, RejectsFunctionsWithoutInstances) {
  Topology t = parse_topology(ReadAsset("fig1.top"));
  ChainFunction ghost;
  ghost.name = "ghost";
  ghost.instances = {"missing"};
  EXPECT_THROW(chain_query(t, {ghost}, "s", "t", Weight::integer(4),
                           std::nullopt),
               std::invalid_argument);
}

TEST(ChainTest, EffectsMatchTheWalkOracle) {
  std::mt19937 rng(5);
  int checked = 0;
  for (int i = 0; i < 10; ++i) {
    Topology t = RandomTopology(rng, 5, 1);
    std::uniform_int_distribution<int> node(0, 4), effect(0, 2),
        bound(1, 12);
    ChainFunction f;
    f.name = "F";
    f.instances = {"n" + std::to_string(node(rng))};
    switch (effect(rng)) {
      case 0:
        f.effect = ChainFunction::Effect::Conserve;
        break;
      case 1:
        f.effect = ChainFunction::Effect::AddConst;
        f.add_gamma = Weight::integer(2);
        break;
      default:
        f.effect = ChainFunction::Effect::MulFactor;
        f.mul_factor = 2;
        break;
    }
    const std::string src = "n0";
    const std::string dst = "n4";
    for (int variant = 0; variant < 3; ++variant) {
      std::optional<Weight> l;
      std::optional<Weight> r;
      if (variant != 1) l = Weight::integer(bound(rng));
      if (variant != 0) r = Weight::integer(bound(rng) % 6 + 1);
      const bool feasible = ChainFeasible(t, {f}, src, dst, l, r);
      Verdict v = run_query(chain_query(t, {f}, src, dst, l, r));
      if (feasible) {
        EXPECT_EQ(v.outcome, DropOutcome::NotDrop)
            << "i=" << i << " variant=" << variant;
      } else if (l.has_value()) {
        // The in-loop cost bound prunes cycles, so infeasibility is decided.
        EXPECT_EQ(v.outcome, DropOutcome::IsDrop)
            << "i=" << i << " variant=" << variant;
      } else {
        // Capacity-only travel cannot prune cycles; the query may stop on
        // fuel and report Unknown instead of IsDrop.
        EXPECT_NE(v.outcome, DropOutcome::NotDrop)
            << "i=" << i << " variant=" << variant;
      }
      ++checked;
    }
  }
  EXPECT_EQ(checked, 30);
}

// ---------------------------------------------------------------------------
// Max-min fairness.

TEST(FairnessTest, ClaimedRatesOnTheSharedSink) {
  Topology t = parse_topology(ReadAsset("fair.top"));
  FlowSet flows = parse_flows(ReadAsset("fair.flows"));
  std::vector<Weight> shares = MaxMinShares(t, flows);
  ASSERT_EQ(shares.size(), 3u);
  EXPECT_EQ(shares[0], Weight::ratio(5, 2));
  EXPECT_EQ(shares[1], Weight::ratio(5, 2));
  EXPECT_EQ(shares[2], Weight::integer(1));

  // Claimed rates 2, 3, 1: the rate-1 claim matches its share; the rate-2
  // claim underuses (share 2.5); the rate-3 claim is consistent with the
  // slack left by the fixed smaller claims.
  std::vector<std::pair<Flow, Verdict>> report = fairness_check(t, flows);
  ASSERT_EQ(report.size(), 3u);
  EXPECT_EQ(report[0].first.rate, Weight::integer(1));
  EXPECT_EQ(report[0].second.outcome, DropOutcome::NotDrop);
  EXPECT_EQ(report[1].first.rate, Weight::integer(2));
  EXPECT_EQ(report[1].second.outcome, DropOutcome::IsDrop);
  EXPECT_EQ(report[2].first.rate, Weight::integer(3));
  EXPECT_EQ(report[2].second.outcome, DropOutcome::NotDrop);
}

bool AllNotDrop(const std::vector<std::pair<Flow, Verdict>>& report) {
  for (const auto& [flow, verdict] : report) {
    if (verdict.outcome != DropOutcome::NotDrop) return false;
  }
  return true;
}

TEST(FairnessTest, ExactSharesAllPass) {
  Topology t = parse_topology(ReadAsset("fair.top"));
  FlowSet flows = parse_flows(ReadAsset("fair.flows"));
  std::vector<Weight> shares = MaxMinShares(t, flows);
  for (std::size_t i = 0; i < flows.flows.size(); ++i) {
    flows.flows[i].rate = shares[i];
  }
  EXPECT_TRUE(AllNotDrop(fairness_check(t, flows)));

  flows.flows[0].rate = shares[0].plus(Weight::ratio(1, 2));
  EXPECT_FALSE(AllNotDrop(fairness_check(t, flows)));
}

TEST(FairnessTest, ExactSharesPassOnRandomTrees) {
  std::mt19937 rng(13);
  for (int i = 0; i < 6; ++i) {
    Topology t = RandomTopology(rng, 5, 0);
    FlowSet flows;
    flows.flows.push_back({"n0", "n4", Weight::integer(1)});
    flows.flows.push_back({"n1", "n4", Weight::integer(1)});
    std::vector<Weight> shares = MaxMinShares(t, flows);
    for (std::size_t k = 0; k < flows.flows.size(); ++k) {
      flows.flows[k].rate = shares[k];
    }
    EXPECT_TRUE(AllNotDrop(fairness_check(t, flows))) << "tree " << i;
    flows.flows[1].rate = shares[1].plus(Weight::integer(1));
    EXPECT_FALSE(AllNotDrop(fairness_check(t, flows))) << "tree " << i;
  }
}

TEST(FairnessTest, PerFlowQueryAgreesWithTheReport) {
  Topology t = parse_topology(ReadAsset("fair.top"));
  FlowSet flows = parse_flows(ReadAsset("fair.flows"));
  std::vector<std::pair<Flow, Verdict>> report = fairness_check(t, flows);
  for (std::size_t i = 0; i < report.size(); ++i) {
    Verdict v = run_query(fairness_query(t, flows, i));
    EXPECT_EQ(v.outcome, report[i].second.outcome) << i;
  }
}

// ---------------------------------------------------------------------------
// Priority shares.

std::vector<World> QosSeeds(const FieldUniverse& u, const std::string& sw,
                            const std::string& pt,
                            const std::vector<std::string>& arrivals) {
  std::vector<World> seeds;
  for (std::size_t i = 0; i < arrivals.size(); ++i) {
    World w = initial_world(u);
    packet_write(w, u, "sw", symbol(sw));
    if (!pt.empty()) packet_write(w, u, "pt", symbol(pt));
    packet_write(w, u, "x", symbol(arrivals[i]));
    packet_write(w, u, "id", symbol(std::to_string(i)));
    seeds.push_back(std::move(w));
  }
  return seeds;
}

std::map<std::string, int> CountForwarded(const EvalResult& r,
                                          const FieldUniverse& u,
                                          const std::string& out_port) {
  std::map<std::string, int> n;
  for (const World& w : r.worlds) {
    if (std::get<std::string>(packet_read(w, u, "pt")) == out_port) {
      ++n[std::get<std::string>(packet_read(w, u, "x"))];
    }
  }
  return n;
}

TEST(QosPolicyTest, CounterSharesMatchTheSequentialOracle) {
  const std::vector<std::pair<std::string, int>> shares = {{"h", 4},
                                                           {"l", 1}};
  const std::vector<std::vector<std::string>> mixes = {
      {"h", "h", "h", "h", "h", "h", "h", "h", "l", "l"},
      {"h", "h", "h", "h", "h", "h", "h", "h", "h", "h"},
      {"l", "l", "l", "h", "h", "h"},
      {"h", "l", "h", "l", "h", "l", "h", "l", "h", "l"},
  };
  for (const auto& arrivals : mixes) {
    FieldUniverse u;
    Expression policy = qos_policy("S", {"in"}, "out", shares, u);
    u.declare("id", FieldKind::NonQuantitative, FieldScope::PacketVar);
    EvalConfig cfg;
    cfg.mode = EvalMode::SharedState;
    cfg.fuel = 64;
    const EvalResult r =
        run_shared(policy, QosSeeds(u, "S", "in", arrivals), u, cfg);
    EXPECT_TRUE(r.saturated);
    EXPECT_EQ(CountForwarded(r, u, "out"), QosForwarded(shares, arrivals));
  }
}

TEST(QosPolicyTest, ValidatesShares) {
  FieldUniverse u;
  EXPECT_THROW(qos_policy("S", {}, "out", {{"h", 2}, {"h", 3}}, u),
               std::invalid_argument);
  FieldUniverse u2;
  EXPECT_THROW(qos_policy("S", {}, "out", {{"h", 0}}, u2),
               std::invalid_argument);
}

TEST(QosQueuePolicyTest, QueueSharesMatchTheTwoPhaseOracle) {
  const std::vector<std::pair<std::string, int>> shares = {{"h", 4},
                                                           {"l", 1}};
  const std::vector<std::vector<std::string>> mixes = {
      {"h", "h", "h", "h", "h", "h", "h", "h", "h", "h", "l", "l"},
      {"h", "h", "h", "h", "h", "h", "h", "h", "h", "h"},
      {"h", "h", "h", "h", "h", "h", "h", "h", "l", "l"},
      {"l", "l", "l", "l", "l"},
      {"h", "l", "h", "l", "h", "h"},
  };
  for (const auto& arrivals : mixes) {
    FieldUniverse u;
    u.declare_queue("S", "q_h", 64);
    u.declare_queue("S", "q_l", 64);
    Expression policy = qos_queue_policy("S", "out", shares, u);
    u.declare("id", FieldKind::NonQuantitative, FieldScope::PacketVar);
    EvalConfig cfg;
    cfg.mode = EvalMode::SharedState;
    cfg.fuel = 64;
    const EvalResult r =
        run_shared(policy, QosSeeds(u, "S", "", arrivals), u, cfg);
    EXPECT_TRUE(r.saturated);
    EXPECT_EQ(CountForwarded(r, u, "out"),
              QosQueueForwarded(shares, arrivals));
  }
}

TEST(BuilderValidationTest, RejectsMalformedDemands) {
  Topology t = TinyTopology();
  FieldUniverse fu;
  const Expression policy = flood_policy(t, fu);
  EXPECT_THROW(cap_reach_query(t, policy, "A", "B", Weight::infinity(),
                               CapMode::UnsplitMin),
               std::invalid_argument);

  FlowSet zero;
  zero.flows.push_back({"A", "B", Weight::integer(0)});
  EXPECT_THROW(fairness_query(t, zero, 0), std::invalid_argument);

  FlowSet stranger;
  stranger.flows.push_back({"A", "elsewhere", Weight::integer(1)});
  EXPECT_THROW(fairness_query(t, stranger, 0), std::invalid_argument);

  Topology uncapped = TinyTopology();
  uncapped.links[0].cap = Weight::infinity();
  FlowSet one;
  one.flows.push_back({"A", "B", Weight::integer(1)});
  EXPECT_THROW(fairness_query(uncapped, one, 0), std::invalid_argument);
}

TEST(QosQueuePolicyTest, RequiresDeclaredQueues) {
  FieldUniverse u;
  EXPECT_THROW(qos_queue_policy("S", "out", {{"h", 2}, {"l", 1}}, u),
               std::invalid_argument);
}

}  // namespace
}  // namespace wnetkat

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

#include "wnetkat/wfa.h"

#include <map>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gtest/gtest.h"
#include "wnetkat/evaluator.h"
#include "wnetkat/expr.h"
#include "wnetkat/field.h"
#include "wnetkat/parser.h"
#include "wnetkat/semiring.h"
#include "wnetkat/weight.h"
#include "wnetkat/world.h"

namespace wnetkat {
namespace {

constexpr int kFuel = 12;

// One shared alphabet for every sample: g over {A, B} plus the filler, and
// the tracked quantitative variable l.
FieldUniverse BaseUniverse() {
  return parse_expr("fields: g:sym, l:num\ng=A & g=B").universe;
}

ClassifyResult Classify(const std::string& text, StructureKind kind) {
  const ParsedExpr p = parse_expr(text, BaseUniverse());
  return classify_weight_regular(p.expr, kind, p.universe);
}

WeightedAutomaton Build(const std::string& text, StructureKind kind,
                        FieldUniverse* out_universe = nullptr) {
  const ParsedExpr p = parse_expr(text, BaseUniverse());
  ClassifyResult cr = classify_weight_regular(p.expr, kind, p.universe);
  if (!cr.accepted.has_value()) {
    ADD_FAILURE() << text << ": " << cr.refusal;
    return WeightedAutomaton{};
  }
  if (out_universe != nullptr) *out_universe = p.universe;
  return expr_to_wfa(*cr.accepted, p.universe);
}

EvalConfig Cfg() {
  EvalConfig cfg;
  cfg.fuel = kFuel;
  return cfg;
}

// One input world per complete non-quantitative test, with the tracked
// variable seeded to the automaton's entry weight.
std::vector<World> EntrySeeds(const FieldUniverse& u,
                              const std::string& tracked,
                              const Weight& entry) {
  std::vector<World> seeds{initial_world(u)};
  for (const FieldId& f : u.fields()) {
    if (f.kind != FieldKind::NonQuantitative ||
        f.scope != FieldScope::PacketVar) {
      continue;
    }
    std::vector<World> next;
    for (const World& w : seeds) {
      for (const std::string& s : u.domain(f.name)) {
        World v = w;
        packet_write(v, u, f.name, symbol(s));
        next.push_back(std::move(v));
      }
    }
    seeds = std::move(next);
  }
  for (World& w : seeds) packet_write(w, u, tracked, quantity(entry));
  return seeds;
}

// Evaluator-side view of the automaton's language. Result worlds are grouped
// by input world and by the non-quantitative projection of their history;
// one group is one observed string, and the structure plus over a group's
// tracked values is that string's weight (parallel derivations combined).
struct Mirror {
  bool saturated = true;
  bool any_nonzero = false;
  // Every group holds one distinct tracked value, so string weights equal
  // path values and extremal queries in either direction are exact.
  bool single_valued = true;
  Weight total;  // plus over all tracked values; zero when no world survives
  std::vector<Weight> string_weights;
};

Mirror RunMirror(const Expression& e, const FieldUniverse& u,
                 const std::string& tracked, const WeightStructure& ops,
                 const Weight& entry) {
  Mirror m;
  m.total = ops.zero();
  std::vector<std::string> nq;
  for (const FieldId& f : u.fields()) {
    if (f.kind == FieldKind::NonQuantitative &&
        f.scope == FieldScope::PacketVar) {
      nq.push_back(f.name);
    }
  }
  std::map<std::pair<int, std::vector<std::string>>, std::set<Weight>> groups;
  int idx = 0;
  for (const World& seed : EntrySeeds(u, tracked, entry)) {
    const EvalResult r = evaluate(e, seed, u, Cfg());
    m.saturated = m.saturated && r.saturated;
    for (const World& w : r.worlds) {
      const Weight v = std::get<Weight>(packet_read(w, u, tracked));
      std::vector<std::string> key;
      for (const Packet& p : w.history) {
        for (const std::string& f : nq) {
          key.push_back(std::get<std::string>(p.fields.at(f)));
        }
      }
      groups[{idx, key}].insert(v);
      if (!(v == ops.zero())) m.any_nonzero = true;
      m.total = ops.plus(m.total, v);
    }
    ++idx;
  }
  for (const auto& [key, values] : groups) {
    if (values.size() > 1) m.single_valued = false;
    Weight fold = ops.zero();
    for (const Weight& v : values) fold = ops.plus(fold, v);
    m.string_weights.push_back(fold);
  }
  return m;
}

const char kWorked[] = "g=A; dup; l<-l+4; g<-B; dup";

TEST(ClassifyTest, AcceptsTheWorkedExample) {
  ClassifyResult cr = Classify(kWorked, StructureKind::MinPlus);
  ASSERT_TRUE(cr.accepted.has_value()) << cr.refusal;
  EXPECT_EQ(cr.accepted->tracked.name, "l");
  EXPECT_EQ(cr.accepted->structure, StructureKind::MinPlus);
  EXPECT_FALSE(cr.accepted->threshold.has_value());
}

TEST(ClassifyTest, RecordsTheFinalThreshold) {
  ClassifyResult cr =
      Classify(std::string(kWorked) + "; l<=3", StructureKind::MinPlus);
  ASSERT_TRUE(cr.accepted.has_value()) << cr.refusal;
  ASSERT_TRUE(cr.accepted->threshold.has_value());
  EXPECT_EQ(cr.accepted->threshold->first, Comparator::LE);
  EXPECT_EQ(cr.accepted->threshold->second, Weight::integer(3));
}

TEST(ClassifyTest, AcceptsInLoopPruningInTheStructureDirection) {
  EXPECT_TRUE(Classify("(l<-l+1; dup; l<=9)*; l<=9", StructureKind::MinPlus)
                  .accepted.has_value());
  EXPECT_TRUE(
      Classify("(l<-min{l,4}; dup; l>=2)*; l>=2", StructureKind::MaxMin)
          .accepted.has_value());
}

TEST(ClassifyTest, RefusalTable) {
  const struct {
    const char* text;
    StructureKind kind;
    const char* refusal;
  } kCases[] = {
      {"EQ q @ A; l<-l+1", StructureKind::MinPlus, "queue operation"},
      {"l=3", StructureKind::MinPlus,
       "equality comparison on the tracked variable"},
      {"!(l<=3)", StructureKind::MinPlus, "negated quantitative atom"},
      {"l<=3; g<-B", StructureKind::MinPlus,
       "comparison is not the final factor"},
      {"l<=3; dup; l<=4", StructureKind::MinPlus,
       "conflicting quantitative comparisons"},
      {"(l<-7; dup)*", StructureKind::MinPlus,
       "constant assignment inside a loop"},
      {"dup; l<-7", StructureKind::MinPlus,
       "constant assignment past the first observation point"},
      {"(l<-l+1)*", StructureKind::MinPlus,
       "weight update inside an observation-free loop"},
      {"l<-l+l", StructureKind::MinPlus, "scaled update"},
      {"l<-l-1", StructureKind::MinPlus, "subtractive update"},
      {"l<-min{l,3}", StructureKind::MinPlus,
       "clamping update under an additive structure"},
      {"l<-l+1", StructureKind::MaxMin,
       "additive update under a clamping structure"},
      {"g=A; dup", StructureKind::MinPlus,
       "no quantitative variable to track"},
      {"(l<-l+1; dup; l>=1)*; l>=1", StructureKind::MinPlus,
       "pruning direction incompatible with the structure"},
      {"(l<-min{l,4}; dup; l<=1)*; l<=1", StructureKind::MaxMin,
       "pruning direction incompatible with the structure"},
  };
  for (const auto& c : kCases) {
    ClassifyResult cr = Classify(c.text, c.kind);
    EXPECT_FALSE(cr.accepted.has_value()) << c.text;
    EXPECT_EQ(cr.refusal, c.refusal) << c.text;
  }
}

TEST(ClassifyTest, RefusesSwitchScopedAndSecondVariables) {
  const ParsedExpr p1 = parse_expr("fields: m:num@switch\nm<-m+1");
  ClassifyResult r1 =
      classify_weight_regular(p1.expr, StructureKind::MinPlus, p1.universe);
  EXPECT_EQ(r1.refusal, "switch-scoped variable 'm'");

  const ParsedExpr p2 = parse_expr("fields: l:num, d:num\nl<-l+1; d<-d+1");
  ClassifyResult r2 =
      classify_weight_regular(p2.expr, StructureKind::MinPlus, p2.universe);
  EXPECT_EQ(r2.refusal, "second quantitative variable 'd'");

  const ParsedExpr p3 = parse_expr("fields: l:num, c:num\nl<=c");
  ClassifyResult r3 =
      classify_weight_regular(p3.expr, StructureKind::MinPlus, p3.universe);
  EXPECT_EQ(r3.refusal, "comparison against a non-constant term");
}

TEST(ExprToWfaTest, WorkedExampleShape) {
  FieldUniverse u;
  WeightedAutomaton a = Build(kWorked, StructureKind::MinPlus, &u);
  EXPECT_EQ(a.structure, StructureKind::MinPlus);
  EXPECT_EQ(a.tracked, "l");
  EXPECT_EQ(a.entry, Weight::integer(0));
  EXPECT_EQ(a.state_count, 3u);
  EXPECT_TRUE(a.zero_hops.empty());
  ASSERT_EQ(a.entry_detail.size(), 1u);
  EXPECT_EQ(a.entry_detail[0].pre, Weight::integer(0));
  EXPECT_EQ(a.entry_detail[0].post, Weight::integer(4));
  EXPECT_EQ(a.atoms[a.entry_detail[0].alpha].at("g"), "A");

  EXPECT_FALSE(emptiness(a));
  OptimalWeight ow = optimal_weight(a);
  ASSERT_TRUE(ow.value.has_value());
  EXPECT_EQ(*ow.value, Weight::integer(4));
  EXPECT_EQ(ow.note, "");
}

TEST(ExprToWfaTest, ThresholdDecidesEmptinessButNotOptimal) {
  WeightedAutomaton tight =
      Build(std::string(kWorked) + "; l<=3", StructureKind::MinPlus);
  ASSERT_TRUE(tight.threshold.has_value());
  EXPECT_TRUE(emptiness(tight));

  WeightedAutomaton loose =
      Build(std::string(kWorked) + "; l<=4", StructureKind::MinPlus);
  EXPECT_FALSE(emptiness(loose));

  // The combined-weight query ignores the threshold entirely.
  for (const WeightedAutomaton& a : {tight, loose}) {
    OptimalWeight ow = optimal_weight(a);
    ASSERT_TRUE(ow.value.has_value());
    EXPECT_EQ(*ow.value, Weight::integer(4));
  }
}

TEST(ExprToWfaTest, EntryConstantBecomesLambda) {
  WeightedAutomaton a = Build("l<-7; g=A; dup", StructureKind::MinPlus);
  EXPECT_EQ(a.entry, Weight::integer(7));
  OptimalWeight ow = optimal_weight(a);
  ASSERT_TRUE(ow.value.has_value());
  EXPECT_EQ(*ow.value, Weight::integer(7));
}

TEST(ExprToWfaTest, ObservationFreePassesBecomeZeroHops) {
  WeightedAutomaton a = Build("g=A; l<-l+1", StructureKind::MinPlus);
  EXPECT_EQ(a.state_count, 1u);
  ASSERT_EQ(a.zero_hops.size(), 1u);
  EXPECT_EQ(a.zero_hops[0].pre, Weight::integer(1));
  EXPECT_EQ(a.atoms[a.zero_hops[0].alpha].at("g"), "A");
  EXPECT_FALSE(emptiness(a));
  OptimalWeight ow = optimal_weight(a);
  ASSERT_TRUE(ow.value.has_value());
  EXPECT_EQ(*ow.value, Weight::integer(1));
}

TEST(ExprToWfaTest, DroppedProgramHasNoAcceptingPath) {
  WeightedAutomaton a = Build("g=A; l<-l+1; drop", StructureKind::MinPlus);
  EXPECT_TRUE(emptiness(a));
  OptimalWeight ow = optimal_weight(a);
  ASSERT_TRUE(ow.value.has_value());
  EXPECT_EQ(*ow.value, Weight::infinity());
  EXPECT_EQ(ow.note, "no accepting path");
}

TEST(ExprToWfaTest, ThrowsOnNonUniformEntryWeight) {
  const ParsedExpr p = parse_expr("(l<-2 & l<-3); dup", BaseUniverse());
  ClassifyResult cr =
      classify_weight_regular(p.expr, StructureKind::MinPlus, p.universe);
  ASSERT_TRUE(cr.accepted.has_value()) << cr.refusal;
  EXPECT_THROW(expr_to_wfa(*cr.accepted, p.universe), std::invalid_argument);
}

TEST(ExprToWfaTest, ThrowsOnLateConstantAssignmentWhenUnclassified) {
  // Bypasses classification to exercise the construction-time guard.
  const ParsedExpr p = parse_expr("dup; l<-7", BaseUniverse());
  WeightRegular wr{p.expr, StructureKind::MinPlus, p.universe.field("l"),
                   std::nullopt};
  EXPECT_THROW(expr_to_wfa(wr, p.universe), std::invalid_argument);
}

TEST(ExprToWfaTest, ThrowsPastTheStateCap) {
  const ParsedExpr p = parse_expr(kWorked, BaseUniverse());
  ClassifyResult cr =
      classify_weight_regular(p.expr, StructureKind::MinPlus, p.universe);
  ASSERT_TRUE(cr.accepted.has_value());
  EXPECT_THROW(expr_to_wfa(*cr.accepted, p.universe, 1),
               std::invalid_argument);
}

TEST(ReduceTest, WorkedExampleHasOneString) {
  const ParsedExpr p = parse_expr(kWorked, BaseUniverse());
  ClassifyResult cr =
      classify_weight_regular(p.expr, StructureKind::MinPlus, p.universe);
  ASSERT_TRUE(cr.accepted.has_value());

  std::set<ReducedString> strings = reduce(*cr.accepted, p.universe, 2);
  ASSERT_EQ(strings.size(), 1u);
  const ReducedString& s = *strings.begin();
  EXPECT_EQ(s.alpha.at("g"), "A");
  EXPECT_EQ(s.omega, Weight::integer(0));
  ASSERT_EQ(s.segments.size(), 2u);
  EXPECT_EQ(s.segments[0].first.at("g"), "A");
  EXPECT_EQ(s.segments[0].second, Weight::integer(0));
  EXPECT_EQ(s.segments[1].first.at("g"), "B");
  EXPECT_EQ(s.segments[1].second, Weight::integer(4));

  // Both observation points are mandatory, so no shorter string exists.
  EXPECT_TRUE(reduce(*cr.accepted, p.universe, 1).empty());
}

TEST(ReduceTest, SeedOverrideShiftsTrackedValues) {
  const ParsedExpr p = parse_expr(kWorked, BaseUniverse());
  ClassifyResult cr =
      classify_weight_regular(p.expr, StructureKind::MinPlus, p.universe);
  ASSERT_TRUE(cr.accepted.has_value());
  std::set<ReducedString> strings =
      reduce(*cr.accepted, p.universe, 2, Weight::integer(10));
  ASSERT_EQ(strings.size(), 1u);
  EXPECT_EQ(strings.begin()->omega, Weight::integer(10));
  EXPECT_EQ(strings.begin()->segments[1].second, Weight::integer(14));
}

TEST(WfaToExprTest, RenderingReplaysTheWorkedExample) {
  FieldUniverse u;
  WeightedAutomaton a = Build(kWorked, StructureKind::MinPlus, &u);
  Expression rebuilt = wfa_to_expr(a, u, 4);

  World seed = initial_world(u);
  packet_write(seed, u, "g", symbol("A"));
  const EvalResult r = evaluate(rebuilt, seed, u, Cfg());
  ASSERT_EQ(r.worlds.size(), 1u);
  const World& w = *r.worlds.begin();
  EXPECT_EQ(std::get<Weight>(packet_read(w, u, "l")), Weight::integer(4));
  EXPECT_EQ(w.history.size(), 3u);

  World other = initial_world(u);
  packet_write(other, u, "g", symbol("B"));
  EXPECT_TRUE(evaluate(rebuilt, other, u, Cfg()).worlds.empty());
}

TEST(ExportTest, ListsHeaderAndTransitions) {
  WeightedAutomaton a =
      Build(std::string(kWorked) + "; l<=3", StructureKind::MinPlus);
  const std::string text = export_automaton(a);
  EXPECT_NE(text.find("structure: min-plus"), std::string::npos);
  EXPECT_NE(text.find("tracked: l"), std::string::npos);
  EXPECT_NE(text.find("states: 3"), std::string::npos);
  EXPECT_NE(text.find("threshold: <= 3"), std::string::npos);
  EXPECT_NE(text.find("-->"), std::string::npos);
}

// ---------------------------------------------------------------------------
// Random agreement between the automaton decision procedures and direct
// evaluation.

std::string RandomUpdate(std::mt19937& rng, bool additive) {
  static const char* kAdd[] = {"l<-l+1", "l<-l+2", "l<-l+2.5", "l<-l+0"};
  static const char* kClamp[] = {"l<-min{l,1}", "l<-min{l,2}",
                                 "l<-min{l,2.5}", "l<-min{l,0}"};
  std::uniform_int_distribution<int> pick(0, 3);
  return additive ? kAdd[pick(rng)] : kClamp[pick(rng)];
}

std::string RandomLeaf(std::mt19937& rng, bool additive) {
  static const char* kPlain[] = {"g=A", "g=B", "g<-A", "g<-B", "dup", "skip"};
  std::uniform_int_distribution<int> pick(0, 7);
  int c = pick(rng);
  if (c < 6) return kPlain[c];
  return RandomUpdate(rng, additive);
}

std::string RandomProgram(std::mt19937& rng, int depth, bool additive) {
  std::uniform_int_distribution<int> pick(0, 9);
  int c = depth <= 0 ? pick(rng) % 6 : pick(rng);
  switch (c) {
    case 6:
      return "(" + RandomProgram(rng, depth - 1, additive) + "; " +
             RandomProgram(rng, depth - 1, additive) + ")";
    case 7:
    case 8:
      return "(" + RandomProgram(rng, depth - 1, additive) + " & " +
             RandomProgram(rng, depth - 1, additive) + ")";
    case 9:
      // Every loop path crosses the observation point, so weighted bodies
      // stay classifiable.
      return "(" + RandomLeaf(rng, additive) + "; dup; " +
             RandomLeaf(rng, additive) + ")*";
    default:
      return RandomLeaf(rng, additive);
  }
}

struct AgreementCounters {
  int accepted = 0;
  int emptiness_checked = 0;
  int optimal_checked = 0;
  int threshold_checked = 0;
};

AgreementCounters RunRandomAgreement(StructureKind kind, int want,
                                     unsigned seed) {
  const WeightStructure ops = make_structure(kind);
  const bool additive =
      kind == StructureKind::MinPlus || kind == StructureKind::MaxPlus;
  const FieldUniverse base = BaseUniverse();
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> coin(0, 3);
  static const char* kCmp[] = {"<", ">", "<=", ">="};
  static const Comparator kCmpId[] = {Comparator::LT, Comparator::GT,
                                      Comparator::LE, Comparator::GE};
  static const char* kBound[] = {"0", "1", "2", "2.5", "3", "4"};

  AgreementCounters n;
  int attempts = 0;
  while (n.accepted < want && attempts < want * 80) {
    ++attempts;
    std::string stripped = RandomProgram(rng, 3, additive);
    if (coin(rng) == 0) {
      std::uniform_int_distribution<int> k(0, 3);
      stripped = "l<-" + std::to_string(k(rng)) + "; " + stripped;
    }
    std::string full = stripped;
    if (kind != StructureKind::AddMin && coin(rng) < 2) {
      std::uniform_int_distribution<int> ci(0, 3), bi(0, 5);
      full += "; l" + std::string(kCmp[ci(rng)]) + kBound[bi(rng)];
    }

    const ParsedExpr pf = parse_expr(full, base);
    ClassifyResult cr =
        classify_weight_regular(pf.expr, kind, pf.universe);
    if (!cr.accepted.has_value()) continue;
    WeightedAutomaton a;
    try {
      a = expr_to_wfa(*cr.accepted, pf.universe);
    } catch (const std::invalid_argument&) {
      continue;
    }
    ++n.accepted;

    const ParsedExpr ps = parse_expr(stripped, base);
    Mirror m = RunMirror(ps.expr, pf.universe, cr.accepted->tracked.name, ops,
                         a.entry);

    // Language emptiness matches reachability of a nonzero-weight world.
    WeightedAutomaton plain = a;
    plain.threshold.reset();
    if (m.any_nonzero) {
      EXPECT_FALSE(emptiness(plain)) << full;
      ++n.emptiness_checked;
    } else if (m.saturated) {
      EXPECT_TRUE(emptiness(plain)) << full;
      ++n.emptiness_checked;
    }
    if (!m.saturated) continue;

    if (ops.idempotent_plus()) {
      OptimalWeight ow = optimal_weight(a);
      if (ow.value.has_value()) {
        EXPECT_EQ(*ow.value, m.total) << full;
        ++n.optimal_checked;
      }
    }

    if (a.threshold.has_value()) {
      auto [cmp, k] = *a.threshold;
      const bool wants_max = cmp == Comparator::GE || cmp == Comparator::GT;
      const bool plus_is_max =
          kind == StructureKind::MaxPlus || kind == StructureKind::MaxMin;
      // The extremal path query is exact against per-string weights when
      // the query direction agrees with plus, or when no string has
      // parallel derivations of distinct values.
      if (wants_max == plus_is_max || m.single_valued) {
        bool hit = false;
        for (const Weight& v : m.string_weights) {
          if (!(v == ops.zero()) && compare(v, cmp, k)) hit = true;
        }
        EXPECT_EQ(emptiness(a), !hit) << full;
        ++n.threshold_checked;
      }
    }
  }
  EXPECT_GE(n.accepted, want);
  EXPECT_GE(n.emptiness_checked, want / 2);
  return n;
}

TEST(WfaAgreementTest, MinPlus) {
  AgreementCounters n = RunRandomAgreement(StructureKind::MinPlus, 30, 11);
  EXPECT_GE(n.optimal_checked, 10);
  EXPECT_GE(n.threshold_checked, 3);
}

TEST(WfaAgreementTest, MaxPlus) {
  AgreementCounters n = RunRandomAgreement(StructureKind::MaxPlus, 30, 22);
  EXPECT_GE(n.optimal_checked, 10);
  EXPECT_GE(n.threshold_checked, 3);
}

TEST(WfaAgreementTest, MaxMin) {
  AgreementCounters n = RunRandomAgreement(StructureKind::MaxMin, 30, 33);
  EXPECT_GE(n.optimal_checked, 10);
  EXPECT_GE(n.threshold_checked, 3);
}

TEST(WfaAgreementTest, AddMin) {
  AgreementCounters n = RunRandomAgreement(StructureKind::AddMin, 30, 44);
  EXPECT_GE(n.accepted, 30);
}

TEST(OptimalWeightTest, RefusesAddMin) {
  WeightedAutomaton a = Build("g=A; dup; l<-min{l,2}", StructureKind::AddMin);
  OptimalWeight ow = optimal_weight(a);
  EXPECT_FALSE(ow.value.has_value());
  EXPECT_NE(ow.note.find("not selective"), std::string::npos);
}

TEST(OptimalWeightTest, ReportsDivergenceUnderMaxPlus) {
  WeightedAutomaton a =
      Build("g=A; (l<-l+1; dup; skip)*; g=A", StructureKind::MaxPlus);
  OptimalWeight ow = optimal_weight(a);
  EXPECT_FALSE(ow.value.has_value());
  EXPECT_NE(ow.note.find("diverges"), std::string::npos);
}

}  // namespace
}  // namespace wnetkat

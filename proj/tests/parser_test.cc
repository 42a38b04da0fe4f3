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

#include "wnetkat/parser.h"

#include <random>

#include "gtest/gtest.h"
#include "oracles.h"
#include "wnetkat/expr.h"

namespace wnetkat {
namespace {

using testing::RandomExpression;
using testing::TwoFieldUniverse;

TEST(ParseExprTest, Constants) {
  EXPECT_EQ(parse_expr("drop").expr, Expression::Drop());
  EXPECT_EQ(parse_expr("skip").expr, Expression::Skip());
  EXPECT_EQ(parse_expr("dup").expr, Expression::Dup());
}

TEST(ParseExprTest, SymbolicAtoms) {
  const ParsedExpr p = parse_expr("sw=A; pt<-1");
  const FieldId sw = p.universe.field("sw");
  const FieldId pt = p.universe.field("pt");
  EXPECT_EQ(p.expr, Expression::Seq(Expression::Test(sw, symbol("A")),
                                    Expression::Assign(pt, symbol("1"))));
  EXPECT_EQ(sw.kind, FieldKind::NonQuantitative);
  EXPECT_TRUE(p.universe.seen_symbols("sw").count("A"));
}

TEST(ParseExprTest, QuantitativeAtomsAreInferred) {
  const ParsedExpr p = parse_expr("c<=3; c<-c+1; d<-c");
  EXPECT_EQ(p.universe.field("c").kind, FieldKind::Quantitative);
  // A single-identifier right-hand side propagates the kind.
  EXPECT_EQ(p.universe.field("d").kind, FieldKind::Quantitative);
  const std::vector<Expression> f = SeqFactors(p.expr);
  ASSERT_EQ(f.size(), 3u);
  EXPECT_EQ(f[0].kind(), Expression::Kind::QTest);
  EXPECT_EQ(f[0].cmp(), Comparator::LE);
  EXPECT_EQ(f[1].kind(), Expression::Kind::QAssign);
  LinearTerm inc = LinearTerm::var("c");
  inc.add_constant(Rational(1));
  EXPECT_EQ(f[1].term(), inc);
}

TEST(ParseExprTest, DeclarationLineFixesKindsAndScopes) {
  const ParsedExpr p =
      parse_expr("fields: c:num, C:num@switch, tag:sym\n"
                 "tag=red; C<-C+c");
  EXPECT_EQ(p.universe.field("c").scope, FieldScope::PacketVar);
  EXPECT_EQ(p.universe.field("C").scope, FieldScope::SwitchVar);
  EXPECT_EQ(p.universe.field("C").kind, FieldKind::Quantitative);
  EXPECT_EQ(p.universe.field("tag").kind, FieldKind::NonQuantitative);
}

TEST(ParseExprTest, EqualityOnQuantitativeFieldIsAComparison) {
  const ParsedExpr p = parse_expr("fields: c:num\nc=3");
  EXPECT_EQ(p.expr.kind(), Expression::Kind::QTest);
  EXPECT_EQ(p.expr.cmp(), Comparator::EQ);
}

TEST(ParseExprTest, Precedence) {
  // '&' binds loosest, ';' next, postfix '*' and '!' tightest.
  const ParsedExpr p = parse_expr("f=a; g=b & h=c");
  EXPECT_EQ(p.expr.kind(), Expression::Kind::Union);
  EXPECT_EQ(p.expr.left().kind(), Expression::Kind::Seq);

  const ParsedExpr q = parse_expr("f=a; (g=b & h=c)");
  EXPECT_EQ(q.expr.kind(), Expression::Kind::Seq);

  const ParsedExpr s = parse_expr("f<-a; (g<-b)*");
  EXPECT_EQ(s.expr.right().kind(), Expression::Kind::Star);

  const ParsedExpr n = parse_expr("!f=a; g=b");
  EXPECT_EQ(n.expr.kind(), Expression::Kind::Seq);
  EXPECT_EQ(n.expr.left().kind(), Expression::Kind::Not);
}

TEST(ParseExprTest, QueueOperations) {
  const ParsedExpr p = parse_expr("EQ q @ A; DQ q @ A");
  const std::vector<Expression> f = SeqFactors(p.expr);
  ASSERT_EQ(f.size(), 2u);
  EXPECT_EQ(f[0], Expression::Enq("A", "q"));
  EXPECT_EQ(f[1], Expression::Deq("A", "q"));
  EXPECT_TRUE(p.universe.has_queue("A", "q"));
  EXPECT_EQ(p.universe.queue_capacity("A", "q"),
            FieldUniverse::kDefaultQueueCapacity);
}

TEST(ParseExprTest, MinMaxExpandToGuardedUnions) {
  const ParsedExpr p = parse_expr("fields: c:num, d:num\nc<-min{c,d,4}");
  // The expansion is a union of guarded assignments; its exact shape is
  // covered elsewhere, here only that parsing produced the same tree as the
  // library desugaring.
  const FieldUniverse& u = p.universe;
  const Expression expect =
      AssignMin(u, u.field("c"),
                {LinearTerm::var("c"), LinearTerm::var("d"),
                 LinearTerm::constant_term(Rational(4))});
  EXPECT_EQ(p.expr, expect);
}

TEST(ParseExprTest, CommentsAndBlankLines) {
  const ParsedExpr p = parse_expr("# leading comment\n\nsw=A # trailing\n");
  EXPECT_EQ(p.expr, Expression::Test(p.universe.field("sw"), symbol("A")));
}

TEST(ParseExprTest, ErrorsCarryLineAndColumn) {
  try {
    parse_expr("sw=A;\nsw<-B;; pt<-1");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
    EXPECT_GT(e.column(), 1);
  }
  EXPECT_THROW(parse_expr("(sw=A"), ParseError);
  EXPECT_THROW(parse_expr("sw=A)"), ParseError);
  EXPECT_THROW(parse_expr("sw"), ParseError);
  EXPECT_THROW(parse_expr("c <- min{c}"), ParseError);
}

TEST(ParseExprTest, KindConflictsAreRejected) {
  // Ordered comparison forces a quantitative kind, the declaration says
  // symbolic.
  EXPECT_THROW(parse_expr("fields: f:sym\nf<=3"), ParseError);
  // Negation of a non-predicate.
  EXPECT_THROW(parse_expr("!(sw<-A)"), ParseError);
}

TEST(ParseExprTest, BaseUniverseIsRespected) {
  FieldUniverse base;
  base.declare("c", FieldKind::Quantitative, FieldScope::PacketVar);
  const ParsedExpr p = parse_expr("c<-c+2", base);
  EXPECT_EQ(p.expr.kind(), Expression::Kind::QAssign);
  EXPECT_EQ(p.universe.field("c").kind, FieldKind::Quantitative);
}

TEST(RenderExprTest, RoundTripsRandomExpressions) {
  FieldUniverse u = TwoFieldUniverse();
  std::mt19937 rng(99);
  for (int i = 0; i < 400; ++i) {
    const Expression e = RandomExpression(rng, u, 4);
    const std::string text = render_expr(e);
    const ParsedExpr back = parse_expr(text);
    EXPECT_EQ(back.expr, e) << text;
  }
}

TEST(RenderExprTest, RoundTripsQuantitativeForms) {
  FieldUniverse u;
  u.declare("c", FieldKind::Quantitative, FieldScope::PacketVar);
  u.declare("d", FieldKind::Quantitative, FieldScope::PacketVar);
  LinearTerm drain = LinearTerm::var("c");
  drain.add_constant(Rational(-3));
  LinearTerm mix = LinearTerm::var("c");
  mix.add_var("d", -1).add_constant(Rational::ratio(1, 2));
  const std::vector<Expression> exprs = {
      Expression::QAssign(u.field("c"), drain),
      Expression::QTest(u.field("c"), Comparator::GE, LinearTerm::var("d")),
      Expression::QTest(u.field("d"), Comparator::EQ,
                        LinearTerm::constant_term(Rational::ratio(5, 2))),
      Expression::QAssign(u.field("d"), mix),
      Expression::Seq(
          Expression::Enq("A", "q"),
          Expression::Star(Expression::QTest(u.field("c"), Comparator::LT,
                                             LinearTerm::var("d")))),
  };
  for (const Expression& e : exprs) {
    // Parse against the declaring universe: a bare "d=2.5" would otherwise
    // be inferred as a symbolic test on the symbol "2.5".
    const std::string text = render_expr(e);
    EXPECT_EQ(parse_expr(text, u).expr, e) << text;
  }
}

TEST(ParseTopologyTest, UndirectedLinksExpandToBothDirections) {
  const Topology t = parse_topology(
      "node A\nnode B\nnode C\n"
      "link A 1 B 1 cost=2 cap=5\n"
      "link B 2 C 1 cost=3 cap=1.5 dir\n"
      "queue A fast cap=2\n");
  EXPECT_EQ(t.nodes.size(), 3u);
  ASSERT_EQ(t.links.size(), 3u);
  EXPECT_EQ(t.links[0].u, "A");
  EXPECT_EQ(t.links[0].v, "B");
  EXPECT_EQ(t.links[0].cost, Weight::integer(2));
  EXPECT_EQ(t.links[0].cap, Weight::integer(5));
  EXPECT_EQ(t.links[1].u, "B");
  EXPECT_EQ(t.links[1].v, "A");
  EXPECT_EQ(t.links[2].u, "B");
  EXPECT_EQ(t.links[2].cap, Weight::ratio(3, 2));
  ASSERT_EQ(t.queues.size(), 1u);
  EXPECT_EQ(t.queues[0].sw, "A");
  EXPECT_EQ(t.queues[0].name, "fast");
  EXPECT_EQ(t.queues[0].capacity, 2u);
}

TEST(ParseTopologyTest, AutoAssignedPortsAreFresh) {
  const Topology t = parse_topology(
      "node A\nnode B\nnode C\n"
      "link A B\nlink A C\n");
  ASSERT_EQ(t.links.size(), 4u);
  std::set<std::pair<std::string, std::string>> endpoints;
  for (const Link& l : t.links) {
    EXPECT_TRUE(endpoints.insert({l.u, l.uport}).second)
        << l.u << " " << l.uport;
  }
  // Defaults: cost 1, unbounded capacity.
  EXPECT_EQ(t.links[0].cost, Weight::integer(1));
  EXPECT_EQ(t.links[0].cap, Weight::infinity());
}

TEST(ParseTopologyTest, Errors) {
  EXPECT_THROW(parse_topology("link A 1 B 1\n"), ParseError);  // unknown node
  EXPECT_THROW(parse_topology("node A\nnode B\n"
                              "link A 1 B 1\nlink A 1 B 2\n"),
               ParseError);  // duplicate (node, port)
  EXPECT_THROW(parse_topology("node A\nnode B\nlink A 1 B 1 cost=-2\n"),
               ParseError);
  EXPECT_THROW(parse_topology("node A\nnode B\nlink A 1 B 1 cost=abc\n"),
               ParseError);
  EXPECT_THROW(parse_topology("nodd A\n"), ParseError);
  try {
    parse_topology("node A\nnode B\nlink A 1 C 1\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3);
  }
}

TEST(ParseFlowsTest, ParsesRatesExactly) {
  const FlowSet fs = parse_flows("flow s d rate=2.5\nflow d s rate=1\n");
  ASSERT_EQ(fs.flows.size(), 2u);
  EXPECT_EQ(fs.flows[0].src, "s");
  EXPECT_EQ(fs.flows[0].dst, "d");
  EXPECT_EQ(fs.flows[0].rate, Weight::ratio(5, 2));
  EXPECT_EQ(fs.flows[1].rate, Weight::integer(1));
}

TEST(ParseFlowsTest, Errors) {
  EXPECT_THROW(parse_flows("flow s d rate=0\n"), ParseError);
  EXPECT_THROW(parse_flows("flow s d rate=inf\n"), ParseError);
  EXPECT_THROW(parse_flows("flow s d rate=x\n"), ParseError);
  EXPECT_THROW(parse_flows("flow s d\n"), ParseError);
  EXPECT_THROW(parse_flows("flow s d rate=1\nflow s d rate=2\n"), ParseError);
}

}  // namespace
}  // namespace wnetkat

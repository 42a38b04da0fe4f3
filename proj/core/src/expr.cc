// Copyright 2026 The WNetKAT authors
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

#include "wnetkat/expr.h"

#include <cassert>
#include <stdexcept>
#include <utility>

namespace wnetkat {

LinearTerm LinearTerm::constant_term(const Rational& c) {
  LinearTerm t;
  t.constant = c;
  return t;
}

LinearTerm LinearTerm::constant_weight(const Weight& w) {
  if (w.is_infinite()) {
    throw std::invalid_argument("linear terms take finite constants only");
  }
  return constant_term(w.finite());
}

LinearTerm LinearTerm::var(const std::string& name) {
  LinearTerm t;
  t.coeffs[name] = 1;
  return t;
}

LinearTerm& LinearTerm::add_var(const std::string& name, std::int64_t coeff) {
  std::int64_t updated = coeffs[name] + coeff;
  if (updated == 0) {
    coeffs.erase(name);
  } else {
    coeffs[name] = updated;
  }
  return *this;
}

LinearTerm& LinearTerm::add_constant(const Rational& c) {
  constant = constant + c;
  return *this;
}

bool LinearTerm::is_single_var() const {
  return coeffs.size() == 1 && coeffs.begin()->second == 1 &&
         constant.is_zero();
}

const std::string& LinearTerm::single_var() const {
  assert(is_single_var());
  return coeffs.begin()->first;
}

std::string to_string(Comparator cmp) {
  switch (cmp) {
    case Comparator::LT:
      return "<";
    case Comparator::GT:
      return ">";
    case Comparator::LE:
      return "<=";
    case Comparator::GE:
      return ">=";
    case Comparator::EQ:
      return "=";
  }
  return "?";
}

Comparator flip(Comparator cmp) {
  switch (cmp) {
    case Comparator::LT:
      return Comparator::GT;
    case Comparator::GT:
      return Comparator::LT;
    case Comparator::LE:
      return Comparator::GE;
    case Comparator::GE:
      return Comparator::LE;
    case Comparator::EQ:
      return Comparator::EQ;
  }
  return cmp;
}

bool compare(const Weight& a, Comparator cmp, const Weight& b) {
  switch (cmp) {
    case Comparator::LT:
      return a < b;
    case Comparator::GT:
      return a > b;
    case Comparator::LE:
      return a <= b;
    case Comparator::GE:
      return a >= b;
    case Comparator::EQ:
      return a == b;
  }
  return false;
}

struct Expression::Node {
  Kind kind;
  FieldId field{};
  Value value{};
  LinearTerm term{};
  Comparator cmp = Comparator::EQ;
  std::string sw{};
  std::string queue{};
  std::vector<Expression> children{};
  SourceSpan span{};
};

namespace {

Expression::Kind NodeKind(const Expression& e) { return e.kind(); }

}  // namespace

Expression Expression::Drop() {
  static const auto node =
      std::make_shared<const Node>(Node{.kind = Kind::Drop});
  return Expression(node);
}

Expression Expression::Skip() {
  static const auto node =
      std::make_shared<const Node>(Node{.kind = Kind::Skip});
  return Expression(node);
}

Expression Expression::Dup() {
  static const auto node =
      std::make_shared<const Node>(Node{.kind = Kind::Dup});
  return Expression(node);
}

Expression Expression::Test(const FieldId& f, Value v) {
  if (f.kind != FieldKind::NonQuantitative) {
    throw std::invalid_argument("equality tests take non-quantitative fields; "
                                "use a comparison for " +
                                f.name);
  }
  if (f.scope != FieldScope::PacketVar) {
    throw std::invalid_argument("non-quantitative fields are packet-scoped: " +
                                f.name);
  }
  if (!std::holds_alternative<std::string>(v)) {
    throw std::invalid_argument("equality tests take symbolic values: " +
                                f.name);
  }
  Node n{.kind = Kind::TestEq, .field = f, .value = std::move(v)};
  return Expression(std::make_shared<const Node>(std::move(n)));
}

Expression Expression::Assign(const FieldId& f, Value v) {
  if (f.kind != FieldKind::NonQuantitative) {
    throw std::invalid_argument(
        "assignments of symbols take non-quantitative fields: " + f.name);
  }
  if (f.scope != FieldScope::PacketVar) {
    throw std::invalid_argument("non-quantitative fields are packet-scoped: " +
                                f.name);
  }
  if (!std::holds_alternative<std::string>(v)) {
    throw std::invalid_argument("assignments take symbolic values: " + f.name);
  }
  Node n{.kind = Kind::Assign, .field = f, .value = std::move(v)};
  return Expression(std::make_shared<const Node>(std::move(n)));
}

Expression Expression::QAssign(const FieldId& f, LinearTerm term) {
  if (f.kind != FieldKind::Quantitative) {
    throw std::invalid_argument("term assignments take quantitative fields: " +
                                f.name);
  }
  Node n{.kind = Kind::QAssign, .field = f, .term = std::move(term)};
  return Expression(std::make_shared<const Node>(std::move(n)));
}

Expression Expression::QTest(const FieldId& f, Comparator cmp,
                             LinearTerm term) {
  if (f.kind != FieldKind::Quantitative) {
    throw std::invalid_argument("comparisons take quantitative fields: " +
                                f.name);
  }
  Node n{.kind = Kind::QTest,
         .field = f,
         .term = std::move(term),
         .cmp = cmp};
  return Expression(std::make_shared<const Node>(std::move(n)));
}

Expression Expression::Not(Expression a) {
  if (!IsPredicate(a)) {
    throw std::invalid_argument("negation applies to predicates only");
  }
  Node n{.kind = Kind::Not, .children = {std::move(a)}};
  return Expression(std::make_shared<const Node>(std::move(n)));
}

Expression Expression::Union(Expression a, Expression b) {
  Node n{.kind = Kind::Union, .children = {std::move(a), std::move(b)}};
  return Expression(std::make_shared<const Node>(std::move(n)));
}

Expression Expression::Seq(Expression a, Expression b) {
  Node n{.kind = Kind::Seq, .children = {std::move(a), std::move(b)}};
  return Expression(std::make_shared<const Node>(std::move(n)));
}

Expression Expression::Star(Expression a) {
  Node n{.kind = Kind::Star, .children = {std::move(a)}};
  return Expression(std::make_shared<const Node>(std::move(n)));
}

Expression Expression::Enq(const std::string& sw, const std::string& queue) {
  Node n{.kind = Kind::Enq, .sw = sw, .queue = queue};
  return Expression(std::make_shared<const Node>(std::move(n)));
}

Expression Expression::Deq(const std::string& sw, const std::string& queue) {
  Node n{.kind = Kind::Deq, .sw = sw, .queue = queue};
  return Expression(std::make_shared<const Node>(std::move(n)));
}

Expression::Kind Expression::kind() const { return node_->kind; }

const FieldId& Expression::field() const {
  assert(node_->kind == Kind::TestEq || node_->kind == Kind::Assign ||
         node_->kind == Kind::QAssign || node_->kind == Kind::QTest);
  return node_->field;
}

const Value& Expression::value() const {
  assert(node_->kind == Kind::TestEq || node_->kind == Kind::Assign);
  return node_->value;
}

const LinearTerm& Expression::term() const {
  assert(node_->kind == Kind::QAssign || node_->kind == Kind::QTest);
  return node_->term;
}

Comparator Expression::cmp() const {
  assert(node_->kind == Kind::QTest);
  return node_->cmp;
}

const std::string& Expression::queue_switch() const {
  assert(node_->kind == Kind::Enq || node_->kind == Kind::Deq);
  return node_->sw;
}

const std::string& Expression::queue_name() const {
  assert(node_->kind == Kind::Enq || node_->kind == Kind::Deq);
  return node_->queue;
}

const Expression& Expression::left() const {
  assert(node_->children.size() == 2);
  return node_->children[0];
}

const Expression& Expression::right() const {
  assert(node_->children.size() == 2);
  return node_->children[1];
}

const Expression& Expression::body() const {
  assert(node_->children.size() == 1);
  return node_->children[0];
}

const SourceSpan& Expression::span() const { return node_->span; }

Expression Expression::WithSpan(const SourceSpan& span) const {
  Node copy = *node_;
  copy.span = span;
  return Expression(std::make_shared<const Node>(std::move(copy)));
}

bool operator==(const Expression& a, const Expression& b) {
  if (a.node_ == b.node_) return true;
  if (a.node_->kind != b.node_->kind) return false;
  const auto& an = *a.node_;
  const auto& bn = *b.node_;
  switch (an.kind) {
    case Expression::Kind::Drop:
    case Expression::Kind::Skip:
    case Expression::Kind::Dup:
      return true;
    case Expression::Kind::TestEq:
    case Expression::Kind::Assign:
      return an.field == bn.field && an.value == bn.value;
    case Expression::Kind::QAssign:
      return an.field == bn.field && an.term == bn.term;
    case Expression::Kind::QTest:
      return an.field == bn.field && an.cmp == bn.cmp && an.term == bn.term;
    case Expression::Kind::Enq:
    case Expression::Kind::Deq:
      return an.sw == bn.sw && an.queue == bn.queue;
    case Expression::Kind::Not:
    case Expression::Kind::Union:
    case Expression::Kind::Seq:
    case Expression::Kind::Star:
      return an.children == bn.children;
  }
  return false;
}

bool IsPredicate(const Expression& e) {
  switch (e.kind()) {
    case Expression::Kind::Drop:
    case Expression::Kind::Skip:
    case Expression::Kind::TestEq:
    case Expression::Kind::QTest:
      return true;
    case Expression::Kind::Not:
      return IsPredicate(e.body());
    case Expression::Kind::Union:
    case Expression::Kind::Seq:
      return IsPredicate(e.left()) && IsPredicate(e.right());
    default:
      return false;
  }
}

Expression NAryUnion(const std::vector<Expression>& es) {
  if (es.empty()) return Expression::Drop();
  Expression acc = es.back();
  for (auto it = std::next(es.rbegin()); it != es.rend(); ++it) {
    acc = Expression::Union(*it, std::move(acc));
  }
  return acc;
}

Expression NArySeq(const std::vector<Expression>& es) {
  if (es.empty()) return Expression::Skip();
  Expression acc = es.back();
  for (auto it = std::next(es.rbegin()); it != es.rend(); ++it) {
    acc = Expression::Seq(*it, std::move(acc));
  }
  return acc;
}

std::vector<Expression> SeqFactors(const Expression& e) {
  std::vector<Expression> out;
  std::vector<Expression> stack{e};
  while (!stack.empty()) {
    Expression top = stack.back();
    stack.pop_back();
    if (NodeKind(top) == Expression::Kind::Seq) {
      stack.push_back(top.right());
      stack.push_back(top.left());
    } else {
      out.push_back(std::move(top));
    }
  }
  return out;
}

std::vector<Expression> UnionAlternatives(const Expression& e) {
  std::vector<Expression> out;
  std::vector<Expression> stack{e};
  while (!stack.empty()) {
    Expression top = stack.back();
    stack.pop_back();
    if (NodeKind(top) == Expression::Kind::Union) {
      stack.push_back(top.right());
      stack.push_back(top.left());
    } else {
      out.push_back(std::move(top));
    }
  }
  return out;
}

namespace {

const FieldId& QuantField(const FieldUniverse& universe,
                          const std::string& name) {
  const FieldId& f = universe.field(name);
  if (f.kind != FieldKind::Quantitative) {
    throw std::invalid_argument("field is not quantitative: " + name);
  }
  return f;
}

Expression StaticTruth(bool truth) {
  return truth ? Expression::Skip() : Expression::Drop();
}

// delta cmp max(0, v + d), with delta and d rational and v a non-negative
// variable. Reduces to a test on v, or to Skip/Drop when the comparison is
// settled by the clamp.
Expression CompareConstWithVarPlus(const FieldUniverse& universe,
                                   const Rational& delta,
                                   Comparator cmp,
                                   const std::string& v, const Rational& d) {
  const FieldId& field = QuantField(universe, v);
  if (delta.is_negative()) {
    // A negative constant is below every clamped value.
    return StaticTruth(cmp == Comparator::LT || cmp == Comparator::LE);
  }
  if (delta.is_zero()) {
    // max(0, v + d) is zero iff v <= -d.
    switch (cmp) {
      case Comparator::LE:
        return Expression::Skip();
      case Comparator::GT:
        return Expression::Drop();
      case Comparator::LT: {
        Rational pivot = -d;
        if (pivot.is_negative()) return Expression::Skip();  // v > -d always
        return Expression::QTest(field, Comparator::GT,
                                 LinearTerm::constant_term(pivot));
      }
      case Comparator::GE:
      case Comparator::EQ: {
        Rational pivot = -d;
        if (pivot.is_negative()) return Expression::Drop();
        return Expression::QTest(field, Comparator::LE,
                                 LinearTerm::constant_term(pivot));
      }
    }
  }
  // delta > 0: the clamp cannot fire on the deciding side, so compare raw:
  // delta cmp v + d  <=>  v flip(cmp) delta - d.
  Rational pivot = delta - d;
  if (pivot.is_negative()) {
    // v >= 0 > pivot.
    return StaticTruth(flip(cmp) == Comparator::GT ||
                       flip(cmp) == Comparator::GE);
  }
  return Expression::QTest(field, flip(cmp), LinearTerm::constant_term(pivot));
}

// delta cmp max(0, d - v), same conventions.
Expression CompareConstWithConstMinusVar(const FieldUniverse& universe,
                                         const Rational& delta,
                                         Comparator cmp,
                                         const std::string& v,
                                         const Rational& d) {
  const FieldId& field = QuantField(universe, v);
  if (delta.is_negative()) {
    return StaticTruth(cmp == Comparator::LT || cmp == Comparator::LE);
  }
  if (delta.is_zero()) {
    // max(0, d - v) is zero iff v >= d.
    switch (cmp) {
      case Comparator::LE:
        return Expression::Skip();
      case Comparator::GT:
        return Expression::Drop();
      case Comparator::LT:
        if (d.is_negative() || d.is_zero()) return Expression::Drop();
        return Expression::QTest(field, Comparator::LT,
                                 LinearTerm::constant_term(d));
      case Comparator::GE:
      case Comparator::EQ:
        if (d.is_negative()) return Expression::Skip();
        return Expression::QTest(field, Comparator::GE,
                                 LinearTerm::constant_term(d));
    }
  }
  // delta > 0: delta cmp d - v  <=>  v cmp d - delta.
  Rational pivot = d - delta;
  if (pivot.is_negative()) {
    // v >= 0 > pivot: v <cmp> pivot fails for LT/LE/EQ, holds for GT/GE.
    return StaticTruth(cmp == Comparator::GT || cmp == Comparator::GE);
  }
  return Expression::QTest(field, cmp, LinearTerm::constant_term(pivot));
}

Weight ClampedConstant(const Rational& c) {
  if (c.is_negative()) return Weight();
  return Weight::from_rational(c);
}

}  // namespace

Expression CompareTerms(const FieldUniverse& universe, const LinearTerm& lhs,
                        Comparator cmp, const LinearTerm& rhs) {
  if (lhs.is_single_var()) {
    return Expression::QTest(QuantField(universe, lhs.single_var()), cmp, rhs);
  }
  if (rhs.is_single_var()) {
    return Expression::QTest(QuantField(universe, rhs.single_var()),
                             flip(cmp), lhs);
  }
  if (lhs.is_constant() && rhs.is_constant()) {
    return StaticTruth(
        compare(ClampedConstant(lhs.constant), cmp,
                ClampedConstant(rhs.constant)));
  }
  if (lhs.is_constant() && rhs.coeffs.size() == 1) {
    const auto& [name, coeff] = *rhs.coeffs.begin();
    if (coeff == 1) {
      return CompareConstWithVarPlus(universe, lhs.constant, cmp, name,
                                     rhs.constant);
    }
    if (coeff == -1) {
      return CompareConstWithConstMinusVar(universe, lhs.constant, cmp, name,
                                           rhs.constant);
    }
  }
  if (rhs.is_constant()) {
    return CompareTerms(universe, rhs, flip(cmp), lhs);
  }
  throw std::invalid_argument(
      "comparison between these terms is not expressible as a test");
}

namespace {

Expression GuardedBranch(const FieldUniverse& universe, const FieldId& x,
                         const std::vector<LinearTerm>& operands,
                         std::size_t i, bool minimum, bool* dead) {
  std::vector<Expression> factors;
  for (std::size_t j = 0; j < operands.size(); ++j) {
    if (j == i) continue;
    // Strict against earlier operands so ties resolve to the first one.
    Comparator cmp;
    if (minimum) {
      cmp = j < i ? Comparator::LT : Comparator::LE;
    } else {
      cmp = j < i ? Comparator::GT : Comparator::GE;
    }
    Expression guard = CompareTerms(universe, operands[i], cmp, operands[j]);
    if (guard.kind() == Expression::Kind::Drop) {
      *dead = true;
      return Expression::Drop();
    }
    if (guard.kind() == Expression::Kind::Skip) continue;
    factors.push_back(std::move(guard));
  }
  factors.push_back(Expression::QAssign(x, operands[i]));
  *dead = false;
  return NArySeq(factors);
}

Expression AssignExtremum(const FieldUniverse& universe, const FieldId& x,
                          const std::vector<LinearTerm>& operands,
                          bool minimum) {
  if (operands.empty()) {
    throw std::invalid_argument("min/max needs at least one operand");
  }
  if (x.kind != FieldKind::Quantitative) {
    throw std::invalid_argument("min/max assigns to quantitative fields: " +
                                x.name);
  }
  if (operands.size() == 1) {
    return Expression::QAssign(x, operands[0]);
  }
  std::vector<Expression> branches;
  for (std::size_t i = 0; i < operands.size(); ++i) {
    bool dead = false;
    Expression branch = GuardedBranch(universe, x, operands, i, minimum, &dead);
    if (!dead) branches.push_back(std::move(branch));
  }
  return NAryUnion(branches);
}

void RequireVarOrConst(const LinearTerm& t) {
  if (!t.is_single_var() && !t.is_constant()) {
    throw std::invalid_argument(
        "min/max operands must be variables or constants");
  }
}

}  // namespace

Expression AssignMin(const FieldUniverse& universe, const FieldId& x,
                     const std::vector<LinearTerm>& operands) {
  return AssignExtremum(universe, x, operands, /*minimum=*/true);
}

Expression AssignMax(const FieldUniverse& universe, const FieldId& x,
                     const std::vector<LinearTerm>& operands) {
  return AssignExtremum(universe, x, operands, /*minimum=*/false);
}

Expression DesugarMin(const FieldUniverse& universe, const FieldId& x,
                      const LinearTerm& a, const LinearTerm& b) {
  RequireVarOrConst(a);
  RequireVarOrConst(b);
  return AssignMin(universe, x, {a, b});
}

Expression DesugarMax(const FieldUniverse& universe, const FieldId& x,
                      const LinearTerm& a, const LinearTerm& b) {
  RequireVarOrConst(a);
  RequireVarOrConst(b);
  return AssignMax(universe, x, {a, b});
}

namespace {

Expression CompareWithExtremum(const FieldUniverse& universe, const FieldId& x,
                               Comparator cmp,
                               const std::vector<LinearTerm>& operands,
                               bool minimum) {
  if (operands.empty()) {
    throw std::invalid_argument("min/max needs at least one operand");
  }
  if (operands.size() == 1) {
    return CompareTerms(universe, LinearTerm::var(x.name), cmp, operands[0]);
  }
  std::vector<Expression> branches;
  for (std::size_t i = 0; i < operands.size(); ++i) {
    std::vector<Expression> factors;
    bool dead = false;
    for (std::size_t j = 0; j < operands.size(); ++j) {
      if (j == i) continue;
      Comparator guard_cmp;
      if (minimum) {
        guard_cmp = j < i ? Comparator::LT : Comparator::LE;
      } else {
        guard_cmp = j < i ? Comparator::GT : Comparator::GE;
      }
      Expression guard =
          CompareTerms(universe, operands[i], guard_cmp, operands[j]);
      if (guard.kind() == Expression::Kind::Drop) {
        dead = true;
        break;
      }
      if (guard.kind() == Expression::Kind::Skip) continue;
      factors.push_back(std::move(guard));
    }
    if (dead) continue;
    Expression test =
        CompareTerms(universe, LinearTerm::var(x.name), cmp, operands[i]);
    if (test.kind() == Expression::Kind::Drop) continue;
    if (test.kind() != Expression::Kind::Skip) {
      factors.push_back(std::move(test));
    }
    branches.push_back(NArySeq(factors));
  }
  return NAryUnion(branches);
}

}  // namespace

Expression CompareWithMin(const FieldUniverse& universe, const FieldId& x,
                          Comparator cmp,
                          const std::vector<LinearTerm>& operands) {
  return CompareWithExtremum(universe, x, cmp, operands, /*minimum=*/true);
}

Expression CompareWithMax(const FieldUniverse& universe, const FieldId& x,
                          Comparator cmp,
                          const std::vector<LinearTerm>& operands) {
  return CompareWithExtremum(universe, x, cmp, operands, /*minimum=*/false);
}

namespace {

bool IsPlainAtom(const Expression& e) {
  return e.kind() == Expression::Kind::TestEq ||
         e.kind() == Expression::Kind::Assign;
}

// Applies the directed sequence rewrites to a flattened factor list.
// Returns false when the whole sequence collapses to Drop.
bool RewriteFactors(std::vector<Expression>* factors) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i + 1 < factors->size(); ++i) {
      const Expression& a = (*factors)[i];
      const Expression& b = (*factors)[i + 1];
      if (a.kind() == Expression::Kind::Drop ||
          b.kind() == Expression::Kind::Drop) {
        return false;
      }
      if (!IsPlainAtom(a) || !IsPlainAtom(b)) continue;
      if (a.field() == b.field()) {
        bool a_assign = a.kind() == Expression::Kind::Assign;
        bool b_assign = b.kind() == Expression::Kind::Assign;
        if (a_assign && !b_assign && a.value() == b.value()) {
          factors->erase(factors->begin() + i + 1);  // f<-w; f=w  =>  f<-w
          changed = true;
          break;
        }
        if (!a_assign && b_assign && a.value() == b.value()) {
          factors->erase(factors->begin() + i + 1);  // f=w; f<-w  =>  f=w
          changed = true;
          break;
        }
        if (a_assign && b_assign) {
          factors->erase(factors->begin() + i);  // f<-w1; f<-w2  =>  f<-w2
          changed = true;
          break;
        }
        if (!a_assign && !b_assign && a.value() != b.value()) {
          return false;  // f=w1; f=w2 with w1 != w2 never passes
        }
      } else if (b.field().name < a.field().name) {
        std::swap((*factors)[i], (*factors)[i + 1]);
        changed = true;
        break;
      }
    }
  }
  return true;
}

}  // namespace

Expression Normalize(const Expression& e) {
  switch (e.kind()) {
    case Expression::Kind::Not:
      return Expression::Not(Normalize(e.body()));
    case Expression::Kind::Star:
      return Expression::Star(Normalize(e.body()));
    case Expression::Kind::Union:
      return Expression::Union(Normalize(e.left()), Normalize(e.right()));
    case Expression::Kind::Seq: {
      std::vector<Expression> factors;
      for (const Expression& part :
           {Normalize(e.left()), Normalize(e.right())}) {
        for (Expression& f : SeqFactors(part)) {
          factors.push_back(std::move(f));
        }
      }
      if (!RewriteFactors(&factors)) return Expression::Drop();
      if (factors.size() == 1) return factors[0];
      return NArySeq(factors);
    }
    default:
      return e;
  }
}

}  // namespace wnetkat

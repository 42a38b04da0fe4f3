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

#ifndef WNETKAT_EXPR_H_
#define WNETKAT_EXPR_H_

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "wnetkat/field.h"

namespace wnetkat {

struct SourceSpan {
  int line = 0;  // 1-based; 0 means "not from source text"
  int column = 0;
  std::size_t offset = 0;
  std::size_t length = 0;
};

// Sum of quantitative variables with signed integer coefficients plus a
// signed rational constant. Evaluation clamps negative totals at zero
// (truncated subtraction), so "c-3" means max(0, c-3).
struct LinearTerm {
  std::map<std::string, std::int64_t> coeffs;  // non-zero entries only
  Rational constant;

  static LinearTerm constant_term(const Rational& c);
  static LinearTerm constant_weight(const Weight& w);  // pre: finite
  static LinearTerm var(const std::string& name);

  LinearTerm& add_var(const std::string& name, std::int64_t coeff);
  LinearTerm& add_constant(const Rational& c);

  bool is_constant() const { return coeffs.empty(); }
  // Exactly one variable, coefficient 1, constant 0.
  bool is_single_var() const;
  const std::string& single_var() const;

  friend auto operator<=>(const LinearTerm&, const LinearTerm&) = default;
};

enum class Comparator { LT, GT, LE, GE, EQ };

std::string to_string(Comparator cmp);
// Swaps the operand sides: a cmp b  <=>  b flip(cmp) a.
Comparator flip(Comparator cmp);
bool compare(const Weight& a, Comparator cmp, const Weight& b);

// Immutable expression tree with shared subterms. Construction enforces the
// kind discipline: TestEq/Assign take non-quantitative fields and symbols,
// QAssign/QTest take quantitative ones, Not takes a predicate.
class Expression {
 public:
  enum class Kind {
    Drop,
    Skip,
    Dup,
    TestEq,
    Assign,
    QAssign,
    QTest,
    Not,
    Union,
    Seq,
    Star,
    Enq,
    Deq,
  };

  Expression() : Expression(Drop()) {}

  static Expression Drop();
  static Expression Skip();
  static Expression Dup();
  static Expression Test(const FieldId& f, Value v);
  static Expression Assign(const FieldId& f, Value v);
  static Expression QAssign(const FieldId& f, LinearTerm term);
  static Expression QTest(const FieldId& f, Comparator cmp, LinearTerm term);
  static Expression Not(Expression a);
  static Expression Union(Expression a, Expression b);
  static Expression Seq(Expression a, Expression b);
  static Expression Star(Expression a);
  static Expression Enq(const std::string& sw, const std::string& queue);
  static Expression Deq(const std::string& sw, const std::string& queue);

  Kind kind() const;
  const FieldId& field() const;
  const Value& value() const;
  const LinearTerm& term() const;
  Comparator cmp() const;
  const std::string& queue_switch() const;
  const std::string& queue_name() const;
  const Expression& left() const;   // Union, Seq
  const Expression& right() const;  // Union, Seq
  const Expression& body() const;   // Not, Star

  const SourceSpan& span() const;
  Expression WithSpan(const SourceSpan& span) const;

  // Structural equality; source spans are ignored.
  friend bool operator==(const Expression& a, const Expression& b);

 private:
  struct Node;
  explicit Expression(std::shared_ptr<const Node> node)
      : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

// Predicates: Drop, Skip, TestEq, QTest, and Not/Union/Seq of predicates.
bool IsPredicate(const Expression& e);

// Right-folded combinators; the empty union is Drop, the empty sequence Skip.
Expression NAryUnion(const std::vector<Expression>& es);
Expression NArySeq(const std::vector<Expression>& es);

// Flattens nested Seq (resp. Union) spines left-to-right.
std::vector<Expression> SeqFactors(const Expression& e);
std::vector<Expression> UnionAlternatives(const Expression& e);

// Builds a test equivalent to lhs cmp rhs under clamped evaluation. One side
// must be a single variable, or one side a constant and the other a term in
// at most one variable with coefficient +-1; otherwise throws
// std::invalid_argument. The universe resolves variable names to fields.
Expression CompareTerms(const FieldUniverse& universe, const LinearTerm& lhs,
                        Comparator cmp, const LinearTerm& rhs);

// x <- min{operands...} as a union of guarded assignments: the branch for
// operand i fires when it is strictly below all earlier operands and at most
// every later one, so ties pick the first operand. AssignMax mirrors it.
Expression AssignMin(const FieldUniverse& universe, const FieldId& x,
                     const std::vector<LinearTerm>& operands);
Expression AssignMax(const FieldUniverse& universe, const FieldId& x,
                     const std::vector<LinearTerm>& operands);

// The binary special case; operands must be single variables or constants.
Expression DesugarMin(const FieldUniverse& universe, const FieldId& x,
                      const LinearTerm& a, const LinearTerm& b);
Expression DesugarMax(const FieldUniverse& universe, const FieldId& x,
                      const LinearTerm& a, const LinearTerm& b);

// x cmp min{operands...} (resp. max) as a predicate.
Expression CompareWithMin(const FieldUniverse& universe, const FieldId& x,
                          Comparator cmp,
                          const std::vector<LinearTerm>& operands);
Expression CompareWithMax(const FieldUniverse& universe, const FieldId& x,
                          Comparator cmp,
                          const std::vector<LinearTerm>& operands);

// Directed rewriting to a fixpoint inside sequences: redundant test after
// assignment, redundant assignment after test, overwritten assignment,
// contradicting tests, and commutation of adjacent non-quantitative atoms on
// distinct fields into lexicographic field order. Quantitative and queue
// atoms are never commuted.
Expression Normalize(const Expression& e);

}  // namespace wnetkat

#endif  // WNETKAT_EXPR_H_

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

#include "wnetkat/axioms.h"

#include <algorithm>
#include <stdexcept>

namespace wnetkat {
namespace {

const Expression& Need(const std::optional<Expression>& e, const char* name) {
  if (!e.has_value()) {
    throw std::invalid_argument(std::string("law requires binding '") + name +
                                "'");
  }
  return *e;
}

const FieldId& NeedField(const std::optional<FieldId>& f, const char* name) {
  if (!f.has_value()) {
    throw std::invalid_argument(std::string("law requires binding '") + name +
                                "'");
  }
  return *f;
}

const Value& NeedValue(const std::optional<Value>& v, const char* name) {
  if (!v.has_value()) {
    throw std::invalid_argument(std::string("law requires binding '") + name +
                                "'");
  }
  return *v;
}

}  // namespace

std::vector<std::string> axiom_law_ids() {
  return {
      "ka-plus-assoc",      "ka-plus-comm",       "ka-plus-zero",
      "ka-plus-idem",       "ka-seq-assoc",       "ka-one-seq",
      "ka-seq-one",         "ka-seq-dist-l",      "ka-seq-dist-r",
      "ka-zero-seq",        "ka-seq-zero",        "ka-unroll-l",
      "ka-unroll-r",        "ba-plus-dist",       "ba-seq-comm",
      "ba-plus-one",        "ba-excl-mid",        "ba-contra",
      "ba-seq-idem",        "pa-mod-mod-comm",    "pa-mod-filter-comm",
      "pa-dup-filter-comm", "pa-mod-filter",      "pa-filter-mod",
      "pa-mod-mod",         "pa-contra",          "pa-match-all",
  };
}

std::pair<Expression, Expression> axiom_sides(const std::string& law_id,
                                              const LawBindings& b,
                                              const FieldUniverse& universe) {
  using E = Expression;
  if (law_id == "ka-plus-assoc") {
    const E &p = Need(b.p, "p"), &q = Need(b.q, "q"), &r = Need(b.r, "r");
    return {E::Union(p, E::Union(q, r)), E::Union(E::Union(p, q), r)};
  }
  if (law_id == "ka-plus-comm") {
    const E &p = Need(b.p, "p"), &q = Need(b.q, "q");
    return {E::Union(p, q), E::Union(q, p)};
  }
  if (law_id == "ka-plus-zero") {
    const E& p = Need(b.p, "p");
    return {E::Union(p, E::Drop()), p};
  }
  if (law_id == "ka-plus-idem") {
    const E& p = Need(b.p, "p");
    return {E::Union(p, p), p};
  }
  if (law_id == "ka-seq-assoc") {
    const E &p = Need(b.p, "p"), &q = Need(b.q, "q"), &r = Need(b.r, "r");
    return {E::Seq(p, E::Seq(q, r)), E::Seq(E::Seq(p, q), r)};
  }
  if (law_id == "ka-one-seq") {
    const E& p = Need(b.p, "p");
    return {E::Seq(E::Skip(), p), p};
  }
  if (law_id == "ka-seq-one") {
    const E& p = Need(b.p, "p");
    return {E::Seq(p, E::Skip()), p};
  }
  if (law_id == "ka-seq-dist-l") {
    const E &p = Need(b.p, "p"), &q = Need(b.q, "q"), &r = Need(b.r, "r");
    return {E::Seq(p, E::Union(q, r)), E::Union(E::Seq(p, q), E::Seq(p, r))};
  }
  if (law_id == "ka-seq-dist-r") {
    const E &p = Need(b.p, "p"), &q = Need(b.q, "q"), &r = Need(b.r, "r");
    return {E::Seq(E::Union(p, q), r), E::Union(E::Seq(p, r), E::Seq(q, r))};
  }
  if (law_id == "ka-zero-seq") {
    const E& p = Need(b.p, "p");
    return {E::Seq(E::Drop(), p), E::Drop()};
  }
  if (law_id == "ka-seq-zero") {
    const E& p = Need(b.p, "p");
    return {E::Seq(p, E::Drop()), E::Drop()};
  }
  if (law_id == "ka-unroll-l") {
    const E& p = Need(b.p, "p");
    return {E::Union(E::Skip(), E::Seq(p, E::Star(p))), E::Star(p)};
  }
  if (law_id == "ka-unroll-r") {
    const E& p = Need(b.p, "p");
    return {E::Union(E::Skip(), E::Seq(E::Star(p), p)), E::Star(p)};
  }
  if (law_id == "ba-plus-dist") {
    const E &a = Need(b.a, "a"), &bb = Need(b.b, "b"), &c = Need(b.c, "c");
    return {E::Union(a, E::Seq(bb, c)),
            E::Seq(E::Union(a, bb), E::Union(a, c))};
  }
  if (law_id == "ba-seq-comm") {
    const E &a = Need(b.a, "a"), &bb = Need(b.b, "b");
    return {E::Seq(a, bb), E::Seq(bb, a)};
  }
  if (law_id == "ba-plus-one") {
    const E& a = Need(b.a, "a");
    return {E::Union(a, E::Skip()), E::Skip()};
  }
  if (law_id == "ba-excl-mid") {
    const E& a = Need(b.a, "a");
    return {E::Union(a, E::Not(a)), E::Skip()};
  }
  if (law_id == "ba-contra") {
    const E& a = Need(b.a, "a");
    return {E::Seq(a, E::Not(a)), E::Drop()};
  }
  if (law_id == "ba-seq-idem") {
    const E& a = Need(b.a, "a");
    return {E::Seq(a, a), a};
  }
  if (law_id == "pa-mod-mod-comm") {
    const FieldId &f1 = NeedField(b.f1, "f1"), &f2 = NeedField(b.f2, "f2");
    const Value &w1 = NeedValue(b.w1, "w1"), &w2 = NeedValue(b.w2, "w2");
    if (f1 == f2) throw std::invalid_argument("law requires f1 != f2");
    return {E::Seq(E::Assign(f1, w1), E::Assign(f2, w2)),
            E::Seq(E::Assign(f2, w2), E::Assign(f1, w1))};
  }
  if (law_id == "pa-mod-filter-comm") {
    const FieldId &f1 = NeedField(b.f1, "f1"), &f2 = NeedField(b.f2, "f2");
    const Value &w1 = NeedValue(b.w1, "w1"), &w2 = NeedValue(b.w2, "w2");
    if (f1 == f2) throw std::invalid_argument("law requires f1 != f2");
    return {E::Seq(E::Assign(f1, w1), E::Test(f2, w2)),
            E::Seq(E::Test(f2, w2), E::Assign(f1, w1))};
  }
  if (law_id == "pa-dup-filter-comm") {
    const FieldId& f1 = NeedField(b.f1, "f1");
    const Value& w1 = NeedValue(b.w1, "w1");
    return {E::Seq(E::Test(f1, w1), E::Dup()),
            E::Seq(E::Dup(), E::Test(f1, w1))};
  }
  if (law_id == "pa-mod-filter") {
    const FieldId& f1 = NeedField(b.f1, "f1");
    const Value& w1 = NeedValue(b.w1, "w1");
    return {E::Seq(E::Assign(f1, w1), E::Test(f1, w1)), E::Assign(f1, w1)};
  }
  if (law_id == "pa-filter-mod") {
    const FieldId& f1 = NeedField(b.f1, "f1");
    const Value& w1 = NeedValue(b.w1, "w1");
    return {E::Seq(E::Test(f1, w1), E::Assign(f1, w1)), E::Test(f1, w1)};
  }
  if (law_id == "pa-mod-mod") {
    const FieldId& f1 = NeedField(b.f1, "f1");
    const Value &w1 = NeedValue(b.w1, "w1"), &w2 = NeedValue(b.w2, "w2");
    return {E::Seq(E::Assign(f1, w1), E::Assign(f1, w2)), E::Assign(f1, w2)};
  }
  if (law_id == "pa-contra") {
    const FieldId& f1 = NeedField(b.f1, "f1");
    const Value &w1 = NeedValue(b.w1, "w1"), &w2 = NeedValue(b.w2, "w2");
    if (w1 == w2) throw std::invalid_argument("law requires w1 != w2");
    return {E::Seq(E::Test(f1, w1), E::Test(f1, w2)), E::Drop()};
  }
  if (law_id == "pa-match-all") {
    const FieldId& f1 = NeedField(b.f1, "f1");
    std::vector<std::string> dom = universe.domain(f1.name);
    if (dom.empty()) {
      throw std::invalid_argument("match-all law needs a non-empty domain");
    }
    std::vector<Expression> tests;
    tests.reserve(dom.size());
    for (const std::string& s : dom) tests.push_back(E::Test(f1, symbol(s)));
    return {NAryUnion(tests), E::Skip()};
  }
  throw std::invalid_argument("unknown law id '" + law_id + "'");
}

LawOutcome axiom_holds(const std::string& law_id, const LawBindings& b,
                       const FieldUniverse& universe,
                       const std::vector<World>& worlds, int fuel) {
  auto [lhs, rhs] = axiom_sides(law_id, b, universe);
  // Star unrolling is checked as containment: the unrolled side must stay
  // within the star side, which gets one extra round of fuel so boundary
  // worlds are not false positives.
  const bool subset_only =
      law_id == "ka-unroll-l" || law_id == "ka-unroll-r";
  EvalConfig lhs_cfg{fuel, EvalMode::PerWorld};
  EvalConfig rhs_cfg{subset_only ? fuel + 1 : fuel, EvalMode::PerWorld};
  for (const World& w : worlds) {
    EvalResult l = evaluate(lhs, w, universe, lhs_cfg);
    EvalResult r = evaluate(rhs, w, universe, rhs_cfg);
    if (!l.saturated || !r.saturated) return LawOutcome::FuelExhausted;
    if (subset_only) {
      if (!std::includes(r.worlds.begin(), r.worlds.end(), l.worlds.begin(),
                         l.worlds.end())) {
        return LawOutcome::Violated;
      }
    } else if (l.worlds != r.worlds) {
      return LawOutcome::Violated;
    }
  }
  return LawOutcome::Holds;
}

}  // namespace wnetkat

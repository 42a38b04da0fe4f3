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

#ifndef WNETKAT_AXIOMS_H_
#define WNETKAT_AXIOMS_H_

#include <optional>
#include <string>
#include <vector>

#include "wnetkat/evaluator.h"
#include "wnetkat/expr.h"
#include "wnetkat/field.h"
#include "wnetkat/world.h"

namespace wnetkat {

enum class LawOutcome { Holds, Violated, FuelExhausted };

// Instantiation slots: p,q,r arbitrary expressions; a,b,c predicates;
// f1,f2 non-quantitative packet fields with values w1,w2.
struct LawBindings {
  std::optional<Expression> p, q, r;
  std::optional<Expression> a, b, c;
  std::optional<FieldId> f1, f2;
  std::optional<Value> w1, w2;
};

// Identifiers of the checkable equational laws. Kleene-algebra laws carry
// the ka- prefix, Boolean-algebra laws ba-, packet-algebra laws pa-.
// Star-implication laws (ka-unroll-*) are checked in the unfolding
// direction: the unfolded side must be contained in the star side.
std::vector<std::string> axiom_law_ids();

// Instantiates both sides of the law and compares evaluation results on
// each world. FuelExhausted when either side failed to saturate on some
// world; Violated on the first world whose result sets differ.
LawOutcome axiom_holds(const std::string& law_id, const LawBindings& b,
                       const FieldUniverse& universe,
                       const std::vector<World>& worlds, int fuel);

// The two instantiated sides of the law, for diagnostics and tests.
std::pair<Expression, Expression> axiom_sides(const std::string& law_id,
                                              const LawBindings& b,
                                              const FieldUniverse& universe);

}  // namespace wnetkat

#endif  // WNETKAT_AXIOMS_H_

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

#ifndef WNETKAT_WFA_H_
#define WNETKAT_WFA_H_

#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "wnetkat/expr.h"
#include "wnetkat/field.h"
#include "wnetkat/semiring.h"
#include "wnetkat/weight.h"

namespace wnetkat {

// A complete non-quantitative test: one symbol per non-quantitative packet
// field. Field domains are the symbols seen in the expression plus one
// fresh filler, so the atom space stays finite.
using Atom = std::map<std::string, std::string>;

std::string to_string(const Atom& a);

// Normal-form trace alpha omega p0 d0 dup p1 d1 ... dup pn dn: entry test
// and valuation, then one complete assignment plus tracked value per
// observation point.
struct ReducedString {
  Atom alpha;
  Weight omega;
  std::vector<std::pair<Atom, Weight>> segments;

  friend auto operator<=>(const ReducedString&, const ReducedString&) =
      default;
};

// The compilable fragment: every quantitative atom is a self-update of one
// tracked packet variable composing by the structure's extension operation
// (x <- x + k under min-plus/max-plus, x <- min{x, k} desugared under
// max-min/add-min), plus an optional entry constant assignment and one
// threshold comparison that must also be the final factor.
struct WeightRegular {
  Expression expr;
  StructureKind structure = StructureKind::MinPlus;
  FieldId tracked;
  std::optional<std::pair<Comparator, Weight>> threshold;
};

struct ClassifyResult {
  std::optional<WeightRegular> accepted;
  // First offending atom when refused.
  std::string refusal;
};

// Decides membership in the weight-regular fragment for the given
// structure. Refuses queue operations, switch-scoped variables, a second
// quantitative variable, negated or equality quantitative tests, update
// directions foreign to the structure, updates inside observation-free
// loops, non-final or conflicting thresholds, and infinite update weights.
ClassifyResult classify_weight_regular(const Expression& e,
                                       StructureKind structure,
                                       const FieldUniverse& universe);

// Start transitions keep their pre-merge detail so the automaton can be
// rendered back into an expression: entry atom, the complete assignment in
// force at the first observation point, and the split between pre- and
// post-observation weight.
struct EntryTransition {
  int alpha = 0;  // atom id
  int p0 = 0;     // atom id at the first dup
  Weight pre;     // weight composed before the first dup
  Weight post;    // weight composed after it, up to the target state
  int target = 0;

  friend auto operator<=>(const EntryTransition&, const EntryTransition&) =
      default;
};

struct ZeroHop {
  int alpha = 0;
  int final_atom = 0;
  Weight pre;  // weight composed along the observation-free pass

  friend auto operator<=>(const ZeroHop&, const ZeroHop&) = default;
};

// Weighted automaton over the letter alphabet At x At. A letter (a, b) is
// the pair of complete tests in force at consecutive observation points;
// absent transitions weigh the structure's zero. State 0 is the start.
struct WeightedAutomaton {
  StructureKind structure = StructureKind::MinPlus;
  std::string tracked;
  std::size_t state_count = 0;
  int start = 0;
  std::vector<bool> final;
  std::vector<Atom> atoms;  // atom id -> assignment
  // (from, letter-first atom id, letter-second atom id, to) -> weight,
  // parallel routes already combined.
  std::map<std::tuple<int, int, int, int>, Weight> trans;
  Weight entry = Weight::integer(0);  // lambda
  std::optional<std::pair<Comparator, Weight>> threshold;

  std::vector<EntryTransition> entry_detail;
  std::vector<ZeroHop> zero_hops;
};

// Derivative-style construction: states are (complete test, position)
// residual abstractions discovered from the start; each transition consumes
// one observation point and composes the weight operations up to the next.
// Throws std::invalid_argument when the entry weight is not uniform across
// branches, when a constant assignment occurs past an observation point, or
// past the state cap.
WeightedAutomaton expr_to_wfa(const WeightRegular& wr,
                              const FieldUniverse& universe,
                              std::size_t state_cap = 100000);

// Union over accepting paths of length <= max_len of the path expression:
// entry tests, tracked <- entry weight, the per-hop complete assignments,
// and constant tracked updates following d_i = d_{i-1} (x) r_i; the
// threshold test is appended when present. No accepting path yields drop.
Expression wfa_to_expr(const WeightedAutomaton& a,
                       const FieldUniverse& universe, int max_len);

// All reduced strings of wr.expr with at most max_dups observation points,
// from evaluation over every entry atom with the tracked variable seeded to
// omega (defaults to the classified entry weight).
std::set<ReducedString> reduce(const WeightRegular& wr,
                               const FieldUniverse& universe, int max_dups,
                               std::optional<Weight> omega = std::nullopt);

// True when no accepting path (including observation-free passes) meets the
// attached threshold; without a threshold, true when no final state is
// reachable through nonzero-weight transitions. Bounded-value thresholds
// decide via extremal path value; a diverging max-plus value is decisive
// for lower-bound thresholds.
bool emptiness(const WeightedAutomaton& a);

struct OptimalWeight {
  // Combined weight over all accepting paths; absent when refused or
  // divergent (see note).
  std::optional<Weight> value;
  std::string note;
};

// Structure plus over accepting path weights via generalized Bellman-Ford.
// Refuses non-idempotent plus (add-min); reports divergence when an
// improving cycle exists under max-plus.
OptimalWeight optimal_weight(const WeightedAutomaton& a);

// Plain-text export: structure/start/final/entry header lines, then one
// line per transition "s -- (alpha,beta) / weight --> t".
std::string export_automaton(const WeightedAutomaton& a);

}  // namespace wnetkat

#endif  // WNETKAT_WFA_H_

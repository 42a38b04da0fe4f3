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

#ifndef WNETKAT_EVALUATOR_H_
#define WNETKAT_EVALUATOR_H_

#include <optional>
#include <set>
#include <vector>

#include "wnetkat/expr.h"
#include "wnetkat/field.h"
#include "wnetkat/world.h"

namespace wnetkat {

// PerWorld: every result world carries its own switch valuation and queues.
// SharedState: one mutable (valuation, queues) shared by a FIFO worklist of
// in-flight packets, so counter updates are visible across union forks.
enum class EvalMode { PerWorld, SharedState };

struct EvalConfig {
  // Per-star iteration budget (PerWorld) and worklist budget multiplier
  // (SharedState).
  int fuel = 64;
  EvalMode mode = EvalMode::PerWorld;
};

struct EvalResult {
  std::set<World> worlds;
  // False when some star stopped on fuel before its accumulated set
  // stabilized; the world set is then a lower bound.
  bool saturated = true;
};

// Denotational evaluation of e on one input world. Pure; star accumulates
// iterates until the set stops growing or cfg.fuel rounds elapse.
EvalResult evaluate(const Expression& e, const World& w,
                    const FieldUniverse& universe, const EvalConfig& cfg);

enum class DropOutcome { IsDrop, NotDrop, Unknown };

std::string to_string(DropOutcome outcome);

struct DropReport {
  DropOutcome outcome = DropOutcome::Unknown;
  // A non-empty result world; present iff outcome is NotDrop.
  std::optional<World> witness;
  bool saturated = true;
};

// NotDrop when any input yields a non-empty world set; IsDrop when all
// inputs yield the empty set with saturation; Unknown otherwise. When e is
// queue-free, inputs that differ only in history tails collapse to one
// representative, since queue-free atoms read the head packet only.
DropReport drop_check(const Expression& e, const std::vector<World>& inputs,
                      const FieldUniverse& universe, const EvalConfig& cfg);

// Shared-state worklist semantics. All seeds must share one switch valuation
// and queue store. Items run left-to-right: a union forks the current item
// into worklist entries processed in FIFO order, and switch-variable writes
// are visible to every later item. Star forks the exit continuation first.
// Exceeding fuel * |seeds| live items aborts with saturated = false.
EvalResult run_shared(const Expression& e, const std::vector<World>& seeds,
                      const FieldUniverse& universe, const EvalConfig& cfg);

}  // namespace wnetkat

#endif  // WNETKAT_EVALUATOR_H_

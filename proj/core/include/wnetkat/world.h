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

#ifndef WNETKAT_WORLD_H_
#define WNETKAT_WORLD_H_

#include <compare>
#include <deque>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "wnetkat/field.h"

namespace wnetkat {

// Raised on kind mismatches, undeclared names, and undefined quantitative
// switch-variable reads.
class EvalError : public std::runtime_error {
 public:
  explicit EvalError(const std::string& what) : std::runtime_error(what) {}
};

// Total map over the declared packet variables.
struct Packet {
  std::map<std::string, Value> fields;

  friend auto operator<=>(const Packet&, const Packet&) = default;
};

// Non-empty; index 0 is the current (head) packet, older snapshots follow.
using History = std::vector<Packet>;

// Partial map (switch, field) -> value; an undefined entry is distinguishable
// from every defined one.
struct SwitchValuation {
  std::map<std::pair<std::string, std::string>, Value> entries;

  friend auto operator<=>(const SwitchValuation&,
                          const SwitchValuation&) = default;
};

// Bounded FIFO of histories per declared (switch, queue). Empty queues are
// not materialized, so equal stores compare equal.
struct QueueStore {
  std::map<std::pair<std::string, std::string>, std::deque<History>> queues;

  friend auto operator<=>(const QueueStore&, const QueueStore&) = default;
};

struct World {
  SwitchValuation rho;
  History history;
  QueueStore queues;

  const Packet& head() const { return history.front(); }
  Packet& head() { return history.front(); }

  friend auto operator<=>(const World&, const World&) = default;
};

// A world whose packet maps every declared packet variable to its default:
// the fresh filler symbol for non-quantitative fields, 0 for quantitative.
World initial_world(const FieldUniverse& universe);

// The switch the head packet currently sits at.
const std::string& current_switch(const World& w);

const Value& packet_read(const World& w, const FieldUniverse& universe,
                         const std::string& field);
void packet_write(World& w, const FieldUniverse& universe,
                  const std::string& field, Value value);

// Reads/writes the field at the head packet's current switch. A read of an
// undefined entry yields nullopt; quantitative callers must treat that as an
// error, never as zero.
std::optional<Value> state_read(const World& w, const FieldUniverse& universe,
                                const std::string& field);
void state_write(World& w, const FieldUniverse& universe,
                 const std::string& field, Value value);

// Appends the current history at the tail. Returns false (refusal) when the
// queue is at capacity; the world is unchanged in that case.
bool enqueue(World& w, const FieldUniverse& universe, const std::string& sw,
             const std::string& queue);

// Removes the queue head when it equals the current history; otherwise the
// world passes through unchanged.
void dequeue(World& w, const FieldUniverse& universe, const std::string& sw,
             const std::string& queue);

}  // namespace wnetkat

#endif  // WNETKAT_WORLD_H_

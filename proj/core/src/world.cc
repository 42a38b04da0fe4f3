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

#include "wnetkat/world.h"

namespace wnetkat {
namespace {

void check_kind(const FieldId& f, const Value& v) {
  bool is_symbol = std::holds_alternative<std::string>(v);
  bool wants_symbol = f.kind == FieldKind::NonQuantitative;
  if (is_symbol != wants_symbol) {
    throw EvalError("kind mismatch writing field " + f.name);
  }
}

}  // namespace

World initial_world(const FieldUniverse& universe) {
  World w;
  Packet pk;
  for (const FieldId& f : universe.fields()) {
    if (f.scope != FieldScope::PacketVar) continue;
    if (f.kind == FieldKind::NonQuantitative) {
      pk.fields[f.name] = symbol(universe.other_symbol(f.name));
    } else {
      pk.fields[f.name] = quantity(Weight());
    }
  }
  w.history.push_back(std::move(pk));
  return w;
}

const std::string& current_switch(const World& w) {
  auto it = w.head().fields.find("sw");
  if (it == w.head().fields.end()) {
    throw EvalError("packet without the distinguished sw field");
  }
  return std::get<std::string>(it->second);
}

const Value& packet_read(const World& w, const FieldUniverse& universe,
                         const std::string& field) {
  const FieldId& f = universe.field(field);
  if (f.scope != FieldScope::PacketVar) {
    throw EvalError("packet read of switch-variable " + field);
  }
  auto it = w.head().fields.find(field);
  if (it == w.head().fields.end()) {
    throw EvalError("packet not total over declared field " + field);
  }
  return it->second;
}

void packet_write(World& w, const FieldUniverse& universe,
                  const std::string& field, Value value) {
  const FieldId& f = universe.field(field);
  if (f.scope != FieldScope::PacketVar) {
    throw EvalError("packet write of switch-variable " + field);
  }
  check_kind(f, value);
  w.head().fields[field] = std::move(value);
}

std::optional<Value> state_read(const World& w, const FieldUniverse& universe,
                                const std::string& field) {
  const FieldId& f = universe.field(field);
  if (f.scope != FieldScope::SwitchVar) {
    throw EvalError("state read of packet variable " + field);
  }
  auto it = w.rho.entries.find({current_switch(w), field});
  if (it == w.rho.entries.end()) return std::nullopt;
  return it->second;
}

void state_write(World& w, const FieldUniverse& universe,
                 const std::string& field, Value value) {
  const FieldId& f = universe.field(field);
  if (f.scope != FieldScope::SwitchVar) {
    throw EvalError("state write of packet variable " + field);
  }
  check_kind(f, value);
  w.rho.entries[{current_switch(w), field}] = std::move(value);
}

bool enqueue(World& w, const FieldUniverse& universe, const std::string& sw,
             const std::string& queue) {
  std::size_t capacity = universe.queue_capacity(sw, queue);
  auto& q = w.queues.queues[{sw, queue}];
  if (q.size() >= capacity) {
    if (q.empty()) w.queues.queues.erase({sw, queue});
    return false;
  }
  q.push_back(w.history);
  return true;
}

void dequeue(World& w, const FieldUniverse& universe, const std::string& sw,
             const std::string& queue) {
  if (!universe.has_queue(sw, queue)) {
    throw EvalError("undeclared queue " + queue + "@" + sw);
  }
  auto it = w.queues.queues.find({sw, queue});
  if (it == w.queues.queues.end() || it->second.empty()) return;
  if (it->second.front() == w.history) {
    it->second.pop_front();
    if (it->second.empty()) w.queues.queues.erase(it);
  }
}

}  // namespace wnetkat

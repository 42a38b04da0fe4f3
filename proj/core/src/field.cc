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

#include "wnetkat/field.h"

#include <stdexcept>

namespace wnetkat {

std::string to_string(const Value& v) {
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  return std::get<Weight>(v).to_string();
}

FieldUniverse::FieldUniverse() {
  declare("sw", FieldKind::NonQuantitative, FieldScope::PacketVar);
  declare("pt", FieldKind::NonQuantitative, FieldScope::PacketVar);
}

const FieldId& FieldUniverse::declare(const std::string& name, FieldKind kind,
                                      FieldScope scope) {
  auto it = fields_.find(name);
  if (it != fields_.end()) {
    if (it->second.kind != kind || it->second.scope != scope) {
      throw std::invalid_argument("conflicting declaration of field " + name);
    }
    return it->second;
  }
  return fields_.emplace(name, FieldId{name, kind, scope}).first->second;
}

bool FieldUniverse::is_declared(const std::string& name) const {
  return fields_.count(name) > 0;
}

const FieldId& FieldUniverse::field(const std::string& name) const {
  auto it = fields_.find(name);
  if (it == fields_.end()) throw std::out_of_range("undeclared field " + name);
  return it->second;
}

std::vector<FieldId> FieldUniverse::fields() const {
  std::vector<FieldId> out;
  out.reserve(fields_.size());
  for (const auto& [_, f] : fields_) out.push_back(f);
  return out;
}

void FieldUniverse::add_symbol(const std::string& field,
                               const std::string& sym) {
  symbols_[field].insert(sym);
}

const std::set<std::string>& FieldUniverse::seen_symbols(
    const std::string& field) const {
  static const std::set<std::string> kEmpty;
  auto it = symbols_.find(field);
  return it == symbols_.end() ? kEmpty : it->second;
}

std::string FieldUniverse::other_symbol(const std::string& field) const {
  std::string candidate = "other";
  const auto& seen = seen_symbols(field);
  while (seen.count(candidate) > 0) candidate += "_";
  return candidate;
}

std::vector<std::string> FieldUniverse::domain(const std::string& field) const {
  std::vector<std::string> out;
  for (const auto& s : seen_symbols(field)) out.push_back(s);
  out.push_back(other_symbol(field));
  return out;
}

void FieldUniverse::declare_queue(const std::string& sw,
                                  const std::string& queue,
                                  std::size_t capacity) {
  queues_[{sw, queue}] = capacity;
}

bool FieldUniverse::has_queue(const std::string& sw,
                              const std::string& queue) const {
  return queues_.count({sw, queue}) > 0;
}

std::size_t FieldUniverse::queue_capacity(const std::string& sw,
                                          const std::string& queue) const {
  auto it = queues_.find({sw, queue});
  if (it == queues_.end()) {
    throw std::out_of_range("undeclared queue " + queue + "@" + sw);
  }
  return it->second;
}

void FieldUniverse::merge(const FieldUniverse& other) {
  for (const auto& [name, f] : other.fields_) declare(name, f.kind, f.scope);
  for (const auto& [field, syms] : other.symbols_) {
    for (const auto& s : syms) add_symbol(field, s);
  }
  for (const auto& [key, cap] : other.queues_) {
    declare_queue(key.first, key.second, cap);
  }
}

}  // namespace wnetkat

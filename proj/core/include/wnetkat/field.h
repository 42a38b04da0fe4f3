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

#ifndef WNETKAT_FIELD_H_
#define WNETKAT_FIELD_H_

#include <compare>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "wnetkat/weight.h"

namespace wnetkat {

enum class FieldKind { NonQuantitative, Quantitative };
enum class FieldScope { PacketVar, SwitchVar };

// A declared variable. Identity is the name; kind and scope are fixed by the
// declaring universe.
struct FieldId {
  std::string name;
  FieldKind kind = FieldKind::NonQuantitative;
  FieldScope scope = FieldScope::PacketVar;

  friend std::strong_ordering operator<=>(const FieldId& a, const FieldId& b) {
    return a.name <=> b.name;
  }
  friend bool operator==(const FieldId& a, const FieldId& b) {
    return a.name == b.name;
  }
};

// Symbol for a non-quantitative field, quantity for a quantitative one.
using Value = std::variant<std::string, Weight>;

std::string to_string(const Value& v);

inline Value symbol(std::string s) { return Value(std::move(s)); }
inline Value quantity(Weight w) { return Value(std::move(w)); }

// The up-front declaration context: every field used by a program, the symbol
// universe of each non-quantitative field, and the declared queues. The
// distinguished packet variables sw and pt are always present.
class FieldUniverse {
 public:
  static constexpr std::size_t kDefaultQueueCapacity = 64;

  FieldUniverse();

  // Declares a field, or re-declares it with identical kind/scope.
  // Throws std::invalid_argument on a conflicting redeclaration.
  const FieldId& declare(const std::string& name, FieldKind kind,
                         FieldScope scope);
  bool is_declared(const std::string& name) const;
  // Throws std::out_of_range when undeclared.
  const FieldId& field(const std::string& name) const;
  std::vector<FieldId> fields() const;

  // Records a symbol seen for a non-quantitative field.
  void add_symbol(const std::string& field, const std::string& sym);
  // Symbols seen for the field, without the fresh filler symbol.
  const std::set<std::string>& seen_symbols(const std::string& field) const;
  // A symbol distinct from every seen symbol of the field.
  std::string other_symbol(const std::string& field) const;
  // seen_symbols plus other_symbol: the value universe used for complete
  // tests and for the exhaustive-sum axiom.
  std::vector<std::string> domain(const std::string& field) const;

  void declare_queue(const std::string& sw, const std::string& queue,
                     std::size_t capacity);
  bool has_queue(const std::string& sw, const std::string& queue) const;
  std::size_t queue_capacity(const std::string& sw,
                             const std::string& queue) const;
  const std::map<std::pair<std::string, std::string>, std::size_t>& queues()
      const {
    return queues_;
  }

  // Adds every declaration of other into this universe.
  void merge(const FieldUniverse& other);

 private:
  std::map<std::string, FieldId> fields_;
  std::map<std::string, std::set<std::string>> symbols_;
  std::map<std::pair<std::string, std::string>, std::size_t> queues_;
};

}  // namespace wnetkat

#endif  // WNETKAT_FIELD_H_

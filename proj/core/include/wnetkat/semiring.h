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

#ifndef WNETKAT_SEMIRING_H_
#define WNETKAT_SEMIRING_H_

#include <optional>
#include <string>
#include <string_view>

#include "wnetkat/weight.h"

namespace wnetkat {

// The four built-in weight structures over non-negative rationals + Infinity:
//   MinPlus  (min, +,   zero=inf, one=0)    semiring
//   MaxPlus  (max, +,   zero=inf, one=0)    semiring
//   MaxMin   (max, min, zero=0,   one=inf)  semiring
//   AddMin   (+,   min, zero=0,   one=inf)  strong bimonoid (not distributive)
enum class StructureKind { MinPlus, MaxPlus, MaxMin, AddMin };

std::string to_string(StructureKind kind);
// Accepts "min-plus", "max-plus", "max-min", "add-min".
std::optional<StructureKind> parse_structure_kind(std::string_view text);

class WeightStructure {
 public:
  explicit WeightStructure(StructureKind kind) : kind_(kind) {}

  StructureKind kind() const { return kind_; }
  Weight zero() const;
  Weight one() const;
  // AddMin satisfies every semiring law except distributivity.
  bool is_semiring() const { return kind_ != StructureKind::AddMin; }
  // True when plus is idempotent (all kinds except AddMin).
  bool idempotent_plus() const { return kind_ != StructureKind::AddMin; }

  // Combination of alternatives. The structure's zero element is the unit:
  // in MaxPlus, Infinity plays that role and is the identity of max here,
  // not the order maximum.
  Weight plus(const Weight& a, const Weight& b) const;
  // Extension along a path; the zero element annihilates.
  Weight times(const Weight& a, const Weight& b) const;

 private:
  StructureKind kind_;
};

inline WeightStructure make_structure(StructureKind kind) {
  return WeightStructure(kind);
}

}  // namespace wnetkat

#endif  // WNETKAT_SEMIRING_H_

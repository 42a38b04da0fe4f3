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

#include "wnetkat/semiring.h"

namespace wnetkat {

std::string to_string(StructureKind kind) {
  switch (kind) {
    case StructureKind::MinPlus:
      return "min-plus";
    case StructureKind::MaxPlus:
      return "max-plus";
    case StructureKind::MaxMin:
      return "max-min";
    case StructureKind::AddMin:
      return "add-min";
  }
  return "?";
}

std::optional<StructureKind> parse_structure_kind(std::string_view text) {
  if (text == "min-plus") return StructureKind::MinPlus;
  if (text == "max-plus") return StructureKind::MaxPlus;
  if (text == "max-min") return StructureKind::MaxMin;
  if (text == "add-min") return StructureKind::AddMin;
  return std::nullopt;
}

Weight WeightStructure::zero() const {
  switch (kind_) {
    case StructureKind::MinPlus:
    case StructureKind::MaxPlus:
      return Weight::infinity();
    case StructureKind::MaxMin:
    case StructureKind::AddMin:
      return Weight();
  }
  return Weight();
}

Weight WeightStructure::one() const {
  switch (kind_) {
    case StructureKind::MinPlus:
    case StructureKind::MaxPlus:
      return Weight();
    case StructureKind::MaxMin:
    case StructureKind::AddMin:
      return Weight::infinity();
  }
  return Weight();
}

Weight WeightStructure::plus(const Weight& a, const Weight& b) const {
  switch (kind_) {
    case StructureKind::MinPlus:
      return a.min(b);
    case StructureKind::MaxPlus:
      // zero = Infinity must be the unit of the sum, so it never wins max.
      if (a.is_infinite()) return b;
      if (b.is_infinite()) return a;
      return a.max(b);
    case StructureKind::MaxMin:
      return a.max(b);
    case StructureKind::AddMin:
      return a.plus(b);
  }
  return a;
}

Weight WeightStructure::times(const Weight& a, const Weight& b) const {
  switch (kind_) {
    case StructureKind::MinPlus:
    case StructureKind::MaxPlus:
      return a.plus(b);
    case StructureKind::MaxMin:
    case StructureKind::AddMin:
      return a.min(b);
  }
  return a;
}

}  // namespace wnetkat

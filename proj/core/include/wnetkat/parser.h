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

#ifndef WNETKAT_PARSER_H_
#define WNETKAT_PARSER_H_

#include <stdexcept>
#include <string>
#include <string_view>

#include "wnetkat/expr.h"
#include "wnetkat/field.h"
#include "wnetkat/netmodel.h"

namespace wnetkat {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, int line, int column)
      : std::runtime_error(message + " at line " + std::to_string(line) +
                           ", column " + std::to_string(column)),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

struct ParsedExpr {
  Expression expr;
  FieldUniverse universe;
};

// Grammar (lowest to highest precedence):
//   expr    := term { "&" term }
//   term    := unary { ";" unary }
//   unary   := primary [ "*" ] | "!" unary
//   primary := "drop" | "skip" | "dup" | "(" expr ")"
//            | ident "=" value | ident "<-" rhs | ident cmp rhs
//            | "EQ" ident "@" ident | "DQ" ident "@" ident
//   rhs     := linear | ("min" | "max") "{" rhs "," rhs { "," rhs } "}"
//   linear  := ["-"] atom { ("+" | "-") atom }
//   atom    := ident | number          (number: digits[.digits] or n/d)
//   cmp     := "<" | ">" | "<=" | ">="
// "#" starts a comment to end of line. A leading declaration line
//   fields: name ":" ("num" | "sym") ["@" "switch"] {"," ...}
// fixes kinds and scopes; undeclared identifiers are inferred: comparator or
// arithmetic use forces Quantitative, single-identifier right-hand sides
// propagate, and everything else defaults to a non-quantitative packet
// variable whose right-hand identifiers are symbols. min/max expand at parse
// time into guarded unions. Throws ParseError with line/column.
ParsedExpr parse_expr(std::string_view text);
ParsedExpr parse_expr(std::string_view text, const FieldUniverse& base);

// Precedence-aware rendering; parse_expr(render_expr(e)) reproduces e for
// expressions over declared fields.
std::string render_expr(const Expression& e);

// Topology file: one directive per line.
//   node <name>
//   link <u> <uport> <v> <vport> [cost=<w>] [cap=<w>] [dir]
//   link <u> <v> [cost=<w>] [cap=<w>] [dir]     (auto-assigned ports)
//   queue <switch> <name> [cap=<n>]
// Without "dir" a link also adds the reversed direction. Errors: unknown
// node, duplicate (node, port) endpoint, negative or malformed weight.
Topology parse_topology(std::string_view text);

// Flow file: lines "flow <src> <dst> rate=<w>". Errors: duplicate
// (src, dst) pair, malformed or nonpositive rate.
FlowSet parse_flows(std::string_view text);

}  // namespace wnetkat

#endif  // WNETKAT_PARSER_H_

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

#include "wnetkat/parser.h"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <utility>
#include <vector>

namespace wnetkat {
namespace {

enum class Tok {
  Ident,
  Number,
  LParen,
  RParen,
  LBrace,
  RBrace,
  Comma,
  At,
  Colon,
  Semi,
  Amp,
  Star,
  Bang,
  Plus,
  Minus,
  Slash,
  Arrow,  // <-
  Eq,     // =
  LE,
  GE,
  LT,
  GT,
  End,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  int line = 1;
  int column = 1;
  std::size_t offset = 0;
};

[[noreturn]] void Fail(const std::string& msg, const Token& at) {
  throw ParseError(msg, at.line, at.column);
}

bool IdentStart(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool IdentChar(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

std::vector<Token> Tokenize(std::string_view text) {
  std::vector<Token> out;
  int line = 1;
  int column = 1;
  std::size_t i = 0;
  auto push = [&](Tok kind, std::size_t start, std::size_t len) {
    out.push_back(Token{kind, std::string(text.substr(start, len)), line,
                        column, start});
    column += static_cast<int>(len);
  };
  while (i < text.size()) {
    char c = text[i];
    if (c == '\n') {
      ++line;
      column = 1;
      ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++column;
      ++i;
      continue;
    }
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') ++i;
      continue;
    }
    if (IdentStart(c)) {
      std::size_t start = i;
      while (i < text.size() && IdentChar(text[i])) ++i;
      push(Tok::Ident, start, i - start);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = i;
      while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
      if (i + 1 < text.size() && text[i] == '.' &&
          std::isdigit(static_cast<unsigned char>(text[i + 1]))) {
        ++i;
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
      }
      push(Tok::Number, start, i - start);
      continue;
    }
    switch (c) {
      case '(': push(Tok::LParen, i, 1); ++i; continue;
      case ')': push(Tok::RParen, i, 1); ++i; continue;
      case '{': push(Tok::LBrace, i, 1); ++i; continue;
      case '}': push(Tok::RBrace, i, 1); ++i; continue;
      case ',': push(Tok::Comma, i, 1); ++i; continue;
      case '@': push(Tok::At, i, 1); ++i; continue;
      case ':': push(Tok::Colon, i, 1); ++i; continue;
      case ';': push(Tok::Semi, i, 1); ++i; continue;
      case '&': push(Tok::Amp, i, 1); ++i; continue;
      case '*': push(Tok::Star, i, 1); ++i; continue;
      case '!': push(Tok::Bang, i, 1); ++i; continue;
      case '+': push(Tok::Plus, i, 1); ++i; continue;
      case '-': push(Tok::Minus, i, 1); ++i; continue;
      case '/': push(Tok::Slash, i, 1); ++i; continue;
      case '=': push(Tok::Eq, i, 1); ++i; continue;
      case '<':
        if (i + 1 < text.size() && text[i + 1] == '-') {
          push(Tok::Arrow, i, 2);
          i += 2;
        } else if (i + 1 < text.size() && text[i + 1] == '=') {
          push(Tok::LE, i, 2);
          i += 2;
        } else {
          push(Tok::LT, i, 1);
          ++i;
        }
        continue;
      case '>':
        if (i + 1 < text.size() && text[i + 1] == '=') {
          push(Tok::GE, i, 2);
          i += 2;
        } else {
          push(Tok::GT, i, 1);
          ++i;
        }
        continue;
      default: {
        Token bad{Tok::End, std::string(1, c), line, column, i};
        Fail("unexpected character '" + std::string(1, c) + "'", bad);
      }
    }
  }
  out.push_back(Token{Tok::End, "", line, column, text.size()});
  return out;
}

bool IsKeyword(const Token& t, const char* kw) {
  return t.kind == Tok::Ident && t.text == kw;
}

bool IsCmp(Tok k) {
  return k == Tok::LT || k == Tok::GT || k == Tok::LE || k == Tok::GE;
}

Comparator CmpOf(const Token& t) {
  switch (t.kind) {
    case Tok::LT: return Comparator::LT;
    case Tok::GT: return Comparator::GT;
    case Tok::LE: return Comparator::LE;
    case Tok::GE: return Comparator::GE;
    default: Fail("expected comparison operator", t);
  }
}

Rational ParseRationalText(const std::string& text, const Token& at) {
  auto dot = text.find('.');
  try {
    if (dot == std::string::npos) {
      return Rational(static_cast<std::int64_t>(std::stoll(text)));
    }
    std::string whole = text.substr(0, dot);
    std::string frac = text.substr(dot + 1);
    std::int64_t num = std::stoll(whole + frac);
    std::int64_t den = 1;
    for (std::size_t k = 0; k < frac.size(); ++k) den *= 10;
    return Rational::ratio(num, den);
  } catch (const std::exception&) {
    Fail("malformed number '" + text + "'", at);
  }
}

// Separates leading field declaration lines from the expression body,
// preserving line structure so spans stay accurate.
std::string StripDeclLines(std::string_view text,
                           std::vector<std::string>* decl_lines) {
  std::string body;
  body.reserve(text.size());
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string_view lv =
        text.substr(pos, eol == std::string_view::npos ? text.size() - pos
                                                       : eol - pos);
    std::size_t first = lv.find_first_not_of(" \t\r");
    bool is_decl = first != std::string_view::npos &&
                   lv.substr(first).rfind("fields:", 0) == 0;
    if (is_decl) {
      decl_lines->push_back(std::string(lv.substr(first + 7)));
      body.append(lv.size(), ' ');
    } else {
      body.append(lv);
    }
    if (eol == std::string_view::npos) break;
    body.push_back('\n');
    pos = eol + 1;
  }
  return body;
}

void ApplyDeclLine(const std::string& decl, int line, FieldUniverse& u) {
  std::istringstream in(decl);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::string s;
    for (char c : item) {
      if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
    }
    if (s.empty()) continue;
    auto colon = s.find(':');
    if (colon == std::string::npos) {
      throw ParseError("field declaration needs name:kind", line, 1);
    }
    std::string name = s.substr(0, colon);
    std::string rest = s.substr(colon + 1);
    bool switch_scoped = false;
    auto at = rest.find('@');
    if (at != std::string::npos) {
      if (rest.substr(at + 1) != "switch") {
        throw ParseError("expected @switch in field declaration", line, 1);
      }
      switch_scoped = true;
      rest = rest.substr(0, at);
    }
    FieldKind kind;
    if (rest == "num") {
      kind = FieldKind::Quantitative;
    } else if (rest == "sym") {
      kind = FieldKind::NonQuantitative;
    } else {
      throw ParseError("field kind must be num or sym", line, 1);
    }
    if (kind == FieldKind::NonQuantitative && switch_scoped) {
      throw ParseError("symbolic switch variables are not supported", line, 1);
    }
    u.declare(name, kind,
              switch_scoped ? FieldScope::SwitchVar : FieldScope::PacketVar);
  }
}

// Pass 1: walks the token stream collecting kind evidence for undeclared
// identifiers. Comparators and arithmetic force Quantitative; a single
// identifier on the right of = or <- links the two names; anything left
// non-quantitative treats its right-hand identifiers as symbols.
void InferKinds(const std::vector<Token>& toks, FieldUniverse& u) {
  std::set<std::string> quant;
  std::set<std::string> mentioned;
  std::vector<std::pair<std::string, std::string>> edges;

  auto is_field_pos = [&](std::size_t i) {
    // An identifier introduces a field when followed by =, <-, or a
    // comparison; EQ/DQ operands and keywords are not fields.
    return toks[i].kind == Tok::Ident &&
           (toks[i + 1].kind == Tok::Eq || toks[i + 1].kind == Tok::Arrow ||
            IsCmp(toks[i + 1].kind));
  };

  for (std::size_t i = 0; i + 1 < toks.size(); ++i) {
    if (IsKeyword(toks[i], "EQ") || IsKeyword(toks[i], "DQ")) {
      i += 3;  // queue @ switch
      continue;
    }
    if (!is_field_pos(i)) continue;
    const std::string lhs = toks[i].text;
    mentioned.insert(lhs);
    bool is_cmp = IsCmp(toks[i + 1].kind);
    std::size_t j = i + 2;
    // Scan the right-hand side up to the next connective.
    int brace = 0;
    std::vector<std::size_t> atoms;
    bool arithmetic = false;
    bool extremum = false;
    for (; j < toks.size(); ++j) {
      Tok k = toks[j].kind;
      if (brace == 0 && (k == Tok::Semi || k == Tok::Amp || k == Tok::RParen ||
                         k == Tok::LParen || k == Tok::Star || k == Tok::Bang ||
                         k == Tok::End || k == Tok::Eq || k == Tok::Arrow ||
                         IsCmp(k))) {
        break;
      }
      if (k == Tok::LBrace) ++brace;
      if (k == Tok::RBrace) --brace;
      if (k == Tok::Plus || k == Tok::Minus || k == Tok::Slash) {
        arithmetic = true;
      }
      if (IsKeyword(toks[j], "min") || IsKeyword(toks[j], "max")) {
        extremum = true;
      }
      if (k == Tok::Ident && !IsKeyword(toks[j], "min") &&
          !IsKeyword(toks[j], "max")) {
        atoms.push_back(j);
      }
      if (k == Tok::Number) {
        atoms.push_back(j);
        if (toks[j].text.find('.') != std::string::npos) arithmetic = true;
      }
    }
    bool strong = is_cmp || arithmetic || extremum || atoms.size() > 1;
    if (strong) {
      quant.insert(lhs);
      for (std::size_t a : atoms) {
        if (toks[a].kind == Tok::Ident) {
          quant.insert(toks[a].text);
          mentioned.insert(toks[a].text);
        }
      }
    } else if (atoms.size() == 1 && toks[atoms[0]].kind == Tok::Ident) {
      edges.emplace_back(lhs, toks[atoms[0]].text);
    }
    i = j - 1;
  }

  // Propagate quantitative evidence across single-identifier links.
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& [a, b] : edges) {
      bool aq = quant.count(a) ||
                (u.is_declared(a) && u.field(a).kind == FieldKind::Quantitative);
      bool bq = quant.count(b) ||
                (u.is_declared(b) && u.field(b).kind == FieldKind::Quantitative);
      if (aq && !bq && !u.is_declared(b)) {
        quant.insert(b);
        mentioned.insert(b);
        changed = true;
      }
      if (bq && !aq && !u.is_declared(a)) {
        quant.insert(a);
        changed = true;
      }
    }
  }

  for (const auto& name : quant) {
    if (!u.is_declared(name)) {
      u.declare(name, FieldKind::Quantitative, FieldScope::PacketVar);
    }
  }
  for (const auto& name : mentioned) {
    if (!u.is_declared(name)) {
      u.declare(name, FieldKind::NonQuantitative, FieldScope::PacketVar);
    }
  }
}

class ExprParser {
 public:
  ExprParser(std::vector<Token> toks, FieldUniverse& universe)
      : toks_(std::move(toks)), u_(universe) {}

  Expression Parse() {
    Expression e = ParseUnion();
    Expect(Tok::End, "unexpected trailing input");
    return e;
  }

 private:
  const Token& Peek(std::size_t ahead = 0) const {
    std::size_t i = std::min(pos_ + ahead, toks_.size() - 1);
    return toks_[i];
  }
  const Token& Next() {
    const Token& t = toks_[std::min(pos_, toks_.size() - 1)];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  void Expect(Tok kind, const char* msg) {
    if (Peek().kind != kind) Fail(msg, Peek());
    Next();
  }

  SourceSpan SpanOf(const Token& t) const {
    return SourceSpan{t.line, t.column, t.offset, t.text.size()};
  }

  Expression ParseUnion() {
    std::vector<Expression> terms;
    terms.push_back(ParseSeq());
    while (Peek().kind == Tok::Amp) {
      Next();
      terms.push_back(ParseSeq());
    }
    return terms.size() == 1 ? terms[0] : NAryUnion(terms);
  }

  Expression ParseSeq() {
    std::vector<Expression> factors;
    factors.push_back(ParseUnary());
    while (Peek().kind == Tok::Semi) {
      Next();
      factors.push_back(ParseUnary());
    }
    return factors.size() == 1 ? factors[0] : NArySeq(factors);
  }

  Expression ParseUnary() {
    if (Peek().kind == Tok::Bang) {
      const Token& bang = Next();
      Expression body = ParseUnary();
      if (!IsPredicate(body)) Fail("negation requires a predicate", bang);
      return Expression::Not(body).WithSpan(SpanOf(bang));
    }
    Expression e = ParsePrimary();
    while (Peek().kind == Tok::Star) {
      Next();
      e = Expression::Star(e);
    }
    return e;
  }

  Expression ParsePrimary() {
    const Token& t = Peek();
    if (t.kind == Tok::LParen) {
      Next();
      Expression e = ParseUnion();
      Expect(Tok::RParen, "expected ')'");
      return e;
    }
    if (IsKeyword(t, "drop")) { Next(); return Expression::Drop().WithSpan(SpanOf(t)); }
    if (IsKeyword(t, "skip")) { Next(); return Expression::Skip().WithSpan(SpanOf(t)); }
    if (IsKeyword(t, "dup")) { Next(); return Expression::Dup().WithSpan(SpanOf(t)); }
    if (IsKeyword(t, "EQ") || IsKeyword(t, "DQ")) {
      bool enq = t.text == "EQ";
      Next();
      if (Peek().kind != Tok::Ident) Fail("expected queue name", Peek());
      std::string queue = Next().text;
      Expect(Tok::At, "expected '@'");
      if (Peek().kind != Tok::Ident) Fail("expected switch name", Peek());
      std::string sw = Next().text;
      if (!u_.has_queue(sw, queue)) {
        u_.declare_queue(sw, queue, FieldUniverse::kDefaultQueueCapacity);
      }
      u_.add_symbol("sw", sw);
      Expression e = enq ? Expression::Enq(sw, queue) : Expression::Deq(sw, queue);
      return e.WithSpan(SpanOf(t));
    }
    if (t.kind != Tok::Ident) Fail("expected an atom", t);

    const Token& name = Next();
    const FieldId& f = FieldOf(name);
    const Token& op = Peek();
    bool quant = f.kind == FieldKind::Quantitative;

    if (op.kind == Tok::Eq || IsCmp(op.kind)) {
      Comparator cmp = op.kind == Tok::Eq ? Comparator::EQ : CmpOf(op);
      Next();
      if (!quant) {
        if (cmp != Comparator::EQ) {
          Fail("ordered comparison on a non-quantitative field", op);
        }
        std::string sym = ParseSymbol();
        u_.add_symbol(f.name, sym);
        return Expression::Test(f, symbol(sym)).WithSpan(SpanOf(name));
      }
      return ParseQuantCompare(f, cmp, name);
    }
    if (op.kind == Tok::Arrow) {
      Next();
      if (!quant) {
        std::string sym = ParseSymbol();
        u_.add_symbol(f.name, sym);
        return Expression::Assign(f, symbol(sym)).WithSpan(SpanOf(name));
      }
      return ParseQuantAssign(f, name);
    }
    Fail("expected '=', '<-', or a comparison after identifier", op);
  }

  const FieldId& FieldOf(const Token& name) {
    if (!u_.is_declared(name.text)) {
      Fail("unknown field '" + name.text + "'", name);
    }
    return u_.field(name.text);
  }

  std::string ParseSymbol() {
    const Token& t = Peek();
    if (t.kind != Tok::Ident && t.kind != Tok::Number) {
      Fail("expected a symbol", t);
    }
    return Next().text;
  }

  // min/max of rhs operands, each a linear term; same-kind nesting
  // flattens, mixed nesting is rejected.
  struct Rhs {
    std::optional<bool> take_min;  // nullopt: plain linear
    std::vector<LinearTerm> operands;
    LinearTerm linear;
  };

  Rhs ParseRhs() {
    const Token& t = Peek();
    if (IsKeyword(t, "min") || IsKeyword(t, "max")) {
      bool is_min = t.text == "min";
      Next();
      Expect(Tok::LBrace, "expected '{'");
      Rhs out;
      out.take_min = is_min;
      while (true) {
        Rhs inner = ParseRhs();
        if (inner.take_min.has_value()) {
          if (*inner.take_min != is_min) {
            Fail("mixed min/max nesting is not supported", t);
          }
          for (auto& opnd : inner.operands) out.operands.push_back(opnd);
        } else {
          out.operands.push_back(inner.linear);
        }
        if (Peek().kind == Tok::Comma) {
          Next();
          continue;
        }
        break;
      }
      Expect(Tok::RBrace, "expected '}'");
      if (out.operands.size() < 2) {
        Fail("min/max needs at least two operands", t);
      }
      return out;
    }
    Rhs out;
    out.linear = ParseLinear();
    return out;
  }

  LinearTerm ParseLinear() {
    LinearTerm term;
    int sign = 1;
    if (Peek().kind == Tok::Minus) {
      Next();
      sign = -1;
    }
    ParseLinearAtom(term, sign);
    while (Peek().kind == Tok::Plus || Peek().kind == Tok::Minus) {
      sign = Next().kind == Tok::Plus ? 1 : -1;
      ParseLinearAtom(term, sign);
    }
    return term;
  }

  void ParseLinearAtom(LinearTerm& term, int sign) {
    const Token& t = Peek();
    if (t.kind == Tok::Ident) {
      Next();
      const FieldId& f = FieldOf(t);
      if (f.kind != FieldKind::Quantitative) {
        Fail("'" + t.text + "' is not a quantitative field", t);
      }
      term.add_var(t.text, sign);
      return;
    }
    if (t.kind == Tok::Number) {
      Next();
      Rational r = ParseRationalText(t.text, t);
      if (Peek().kind == Tok::Slash) {
        Next();
        const Token& den = Peek();
        if (den.kind != Tok::Number ||
            den.text.find('.') != std::string::npos) {
          Fail("expected an integer denominator", den);
        }
        Next();
        if (r.den() != 1) Fail("fraction numerator must be an integer", t);
        try {
          r = Rational::ratio(r.num(), std::stoll(den.text));
        } catch (const std::exception&) {
          Fail("malformed fraction", den);
        }
      }
      term.add_constant(sign == 1 ? r : -r);
      return;
    }
    Fail("expected a variable or number", t);
  }

  Expression ParseQuantCompare(const FieldId& f, Comparator cmp,
                               const Token& at) {
    Rhs rhs = ParseRhs();
    try {
      if (!rhs.take_min.has_value()) {
        return CompareTerms(u_, LinearTerm::var(f.name), cmp, rhs.linear)
            .WithSpan(SpanOf(at));
      }
      Expression e = *rhs.take_min
                         ? CompareWithMin(u_, f, cmp, rhs.operands)
                         : CompareWithMax(u_, f, cmp, rhs.operands);
      return e.WithSpan(SpanOf(at));
    } catch (const std::invalid_argument& ex) {
      Fail(ex.what(), at);
    }
  }

  Expression ParseQuantAssign(const FieldId& f, const Token& at) {
    Rhs rhs = ParseRhs();
    try {
      if (!rhs.take_min.has_value()) {
        return Expression::QAssign(f, rhs.linear).WithSpan(SpanOf(at));
      }
      Expression e = *rhs.take_min ? AssignMin(u_, f, rhs.operands)
                                   : AssignMax(u_, f, rhs.operands);
      return e.WithSpan(SpanOf(at));
    } catch (const std::invalid_argument& ex) {
      Fail(ex.what(), at);
    }
  }

  std::vector<Token> toks_;
  FieldUniverse& u_;
  std::size_t pos_ = 0;
};

// Rendering ----------------------------------------------------------------

std::string RenderValue(const Value& v) { return to_string(v); }

std::string RenderRationalAbs(const Rational& r) {
  Rational abs = r.is_negative() ? -r : r;
  return abs.to_string();
}

std::string RenderTerm(const LinearTerm& t) {
  std::vector<std::pair<std::string, bool>> atoms;  // text, negative
  for (const auto& [name, coeff] : t.coeffs) {
    std::int64_t n = coeff < 0 ? -coeff : coeff;
    for (std::int64_t k = 0; k < n; ++k) atoms.emplace_back(name, coeff < 0);
  }
  if (!t.constant.is_zero()) {
    atoms.emplace_back(RenderRationalAbs(t.constant),
                       t.constant.is_negative());
  }
  if (atoms.empty()) return "0";
  std::stable_sort(atoms.begin(), atoms.end(),
                   [](const auto& a, const auto& b) {
                     return a.second < b.second;  // positives first
                   });
  std::string out;
  if (atoms.front().second) out = "0";
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (i == 0 && out.empty()) {
      out = atoms[i].first;
      continue;
    }
    out += atoms[i].second ? " - " : " + ";
    out += atoms[i].first;
  }
  return out;
}

// Precedence levels: union 0, sequence 1, unary 2, atom 3.
int Level(const Expression& e) {
  switch (e.kind()) {
    case Expression::Kind::Union: return 0;
    case Expression::Kind::Seq: return 1;
    case Expression::Kind::Star:
    case Expression::Kind::Not: return 2;
    default: return 3;
  }
}

std::string Render(const Expression& e);

std::string RenderAtLeast(const Expression& e, int level) {
  std::string s = Render(e);
  if (Level(e) < level) return "(" + s + ")";
  return s;
}

std::string Render(const Expression& e) {
  using K = Expression::Kind;
  switch (e.kind()) {
    case K::Drop: return "drop";
    case K::Skip: return "skip";
    case K::Dup: return "dup";
    case K::TestEq:
      return e.field().name + "=" + RenderValue(e.value());
    case K::Assign:
      return e.field().name + "<-" + RenderValue(e.value());
    case K::QTest:
      return e.field().name + (e.cmp() == Comparator::EQ
                                   ? std::string("=")
                                   : to_string(e.cmp())) +
             RenderTerm(e.term());
    case K::QAssign:
      return e.field().name + "<-" + RenderTerm(e.term());
    case K::Enq:
      return "EQ " + e.queue_name() + "@" + e.queue_switch();
    case K::Deq:
      return "DQ " + e.queue_name() + "@" + e.queue_switch();
    case K::Not:
      return "!" + RenderAtLeast(e.body(), 3);
    case K::Star:
      return RenderAtLeast(e.body(), 3) + "*";
    case K::Seq: {
      std::string out;
      for (const Expression& f : SeqFactors(e)) {
        if (!out.empty()) out += "; ";
        out += RenderAtLeast(f, 2);
      }
      return out;
    }
    case K::Union: {
      std::string out;
      for (const Expression& a : UnionAlternatives(e)) {
        if (!out.empty()) out += " & ";
        out += RenderAtLeast(a, 1);
      }
      return out;
    }
  }
  return "drop";
}

// Topology / flow files ----------------------------------------------------

struct LineTokens {
  int line = 0;
  std::vector<std::string> words;
};

std::vector<LineTokens> SplitLines(std::string_view text) {
  std::vector<LineTokens> out;
  int line = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    ++line;
    std::size_t eol = text.find('\n', pos);
    std::string_view lv =
        text.substr(pos, eol == std::string_view::npos ? text.size() - pos
                                                       : eol - pos);
    auto hash = lv.find('#');
    if (hash != std::string_view::npos) lv = lv.substr(0, hash);
    LineTokens lt;
    lt.line = line;
    std::size_t i = 0;
    while (i < lv.size()) {
      while (i < lv.size() && std::isspace(static_cast<unsigned char>(lv[i]))) ++i;
      std::size_t start = i;
      while (i < lv.size() && !std::isspace(static_cast<unsigned char>(lv[i]))) ++i;
      if (i > start) lt.words.emplace_back(lv.substr(start, i - start));
    }
    if (!lt.words.empty()) out.push_back(std::move(lt));
    if (eol == std::string_view::npos) break;
    pos = eol + 1;
  }
  return out;
}

Weight ParseWeightWord(const std::string& text, int line) {
  auto w = Weight::parse(text);
  if (!w.has_value()) {
    throw ParseError("malformed weight '" + text + "'", line, 1);
  }
  return *w;
}

}  // namespace

ParsedExpr parse_expr(std::string_view text) {
  return parse_expr(text, FieldUniverse());
}

ParsedExpr parse_expr(std::string_view text, const FieldUniverse& base) {
  ParsedExpr out;
  out.universe = base;
  std::vector<std::string> decls;
  std::string body = StripDeclLines(text, &decls);
  int decl_line = 1;
  for (const auto& d : decls) ApplyDeclLine(d, decl_line++, out.universe);
  std::vector<Token> toks = Tokenize(body);
  if (toks.size() == 1) {
    throw ParseError("empty expression", 1, 1);
  }
  InferKinds(toks, out.universe);
  ExprParser parser(std::move(toks), out.universe);
  out.expr = parser.Parse();
  return out;
}

std::string render_expr(const Expression& e) { return Render(e); }

Topology parse_topology(std::string_view text) {
  Topology t;
  std::set<std::pair<std::string, std::string>> endpoints;
  std::map<std::string, int> next_port;
  auto claim = [&](const std::string& node, const std::string& port,
                   int line) {
    if (!endpoints.insert({node, port}).second) {
      throw ParseError("duplicate endpoint " + node + ":" + port, line, 1);
    }
  };
  auto fresh_port = [&](const std::string& node) {
    int p = next_port[node] + 1;
    while (endpoints.count({node, std::to_string(p)})) ++p;
    next_port[node] = p;
    return std::to_string(p);
  };
  auto need_node = [&](const std::string& n, int line) {
    if (!t.nodes.count(n)) {
      throw ParseError("unknown node '" + n + "'", line, 1);
    }
  };

  for (const auto& lt : SplitLines(text)) {
    const auto& w = lt.words;
    if (w[0] == "node") {
      if (w.size() != 2) throw ParseError("node takes one name", lt.line, 1);
      t.nodes.insert(w[1]);
      continue;
    }
    if (w[0] == "queue") {
      if (w.size() < 3) {
        throw ParseError("queue takes switch and name", lt.line, 1);
      }
      need_node(w[1], lt.line);
      QueueDecl q{w[1], w[2], FieldUniverse::kDefaultQueueCapacity};
      for (std::size_t i = 3; i < w.size(); ++i) {
        if (w[i].rfind("cap=", 0) == 0) {
          try {
            q.capacity = std::stoull(w[i].substr(4));
          } catch (const std::exception&) {
            throw ParseError("malformed queue capacity", lt.line, 1);
          }
        } else {
          throw ParseError("unknown queue option '" + w[i] + "'", lt.line, 1);
        }
      }
      t.queues.push_back(std::move(q));
      continue;
    }
    if (w[0] != "link") {
      throw ParseError("unknown directive '" + w[0] + "'", lt.line, 1);
    }
    std::vector<std::string> plain;
    Weight cost = Weight::integer(1);
    Weight cap = Weight::infinity();
    bool directed = false;
    for (std::size_t i = 1; i < w.size(); ++i) {
      if (w[i].rfind("cost=", 0) == 0) {
        cost = ParseWeightWord(w[i].substr(5), lt.line);
      } else if (w[i].rfind("cap=", 0) == 0) {
        cap = ParseWeightWord(w[i].substr(4), lt.line);
      } else if (w[i] == "dir") {
        directed = true;
      } else {
        plain.push_back(w[i]);
      }
    }
    Link l;
    if (plain.size() == 4) {
      l = Link{plain[0], plain[1], plain[2], plain[3], cost, cap};
    } else if (plain.size() == 2) {
      need_node(plain[0], lt.line);
      need_node(plain[1], lt.line);
      l = Link{plain[0], fresh_port(plain[0]), plain[1], fresh_port(plain[1]),
               cost, cap};
    } else {
      throw ParseError("link takes u uport v vport or u v", lt.line, 1);
    }
    need_node(l.u, lt.line);
    need_node(l.v, lt.line);
    claim(l.u, l.uport, lt.line);
    claim(l.v, l.vport, lt.line);
    t.links.push_back(l);
    if (!directed) {
      t.links.push_back(Link{l.v, l.vport, l.u, l.uport, l.cost, l.cap});
    }
  }
  return t;
}

FlowSet parse_flows(std::string_view text) {
  FlowSet fs;
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& lt : SplitLines(text)) {
    const auto& w = lt.words;
    if (w[0] != "flow") {
      throw ParseError("unknown directive '" + w[0] + "'", lt.line, 1);
    }
    if (w.size() != 4 || w[3].rfind("rate=", 0) != 0) {
      throw ParseError("flow takes src dst rate=<w>", lt.line, 1);
    }
    Flow f;
    f.src = w[1];
    f.dst = w[2];
    f.rate = ParseWeightWord(w[3].substr(5), lt.line);
    if (f.rate.is_infinite() || f.rate.is_zero()) {
      throw ParseError("flow rate must be finite and positive", lt.line, 1);
    }
    if (!seen.insert({f.src, f.dst}).second) {
      throw ParseError("duplicate flow " + f.src + " -> " + f.dst, lt.line, 1);
    }
    fs.flows.push_back(std::move(f));
  }
  return fs;
}

}  // namespace wnetkat

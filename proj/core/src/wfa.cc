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

#include "wnetkat/wfa.h"

#include <algorithm>
#include <deque>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "wnetkat/evaluator.h"
#include "wnetkat/world.h"

namespace wnetkat {
namespace {

using Kind = Expression::Kind;

Weight ClampConst(const Rational& c) {
  if (c.is_negative()) return Weight::integer(0);
  return Weight::from_rational(c);
}

bool IsIdentityTerm(const LinearTerm& t, const std::string& name) {
  return t.coeffs.size() == 1 && t.coeffs.count(name) != 0 &&
         t.coeffs.at(name) == 1 && t.constant == Rational(0);
}

// x <- min{x, k} desugars into two guarded branches; both operand orders
// are recognized. The guards are consumed with the pattern and do not count
// as threshold occurrences.
struct ClampMatch {
  FieldId field;
  Weight bound;
};

std::optional<ClampMatch> MatchClamp(const Expression& e) {
  if (e.kind() != Kind::Union) return std::nullopt;
  std::vector<Expression> alts = UnionAlternatives(e);
  if (alts.size() != 2) return std::nullopt;
  struct Arm {
    Comparator cmp;
    Rational bound;
    bool identity;
    FieldId field;
  };
  std::vector<Arm> arms;
  for (const Expression& alt : alts) {
    std::vector<Expression> factors = SeqFactors(alt);
    if (factors.size() != 2) return std::nullopt;
    const Expression& guard = factors[0];
    const Expression& update = factors[1];
    if (guard.kind() != Kind::QTest || update.kind() != Kind::QAssign) {
      return std::nullopt;
    }
    if (!(guard.field() == update.field())) return std::nullopt;
    if (!guard.term().is_constant()) return std::nullopt;
    const std::string& name = guard.field().name;
    bool identity = IsIdentityTerm(update.term(), name);
    bool constant = update.term().is_constant() &&
                    update.term().constant == guard.term().constant;
    if (!identity && !constant) return std::nullopt;
    arms.push_back(Arm{guard.cmp(), guard.term().constant, identity,
                       guard.field()});
  }
  if (!(arms[0].field == arms[1].field)) return std::nullopt;
  if (arms[0].bound != arms[1].bound) return std::nullopt;
  bool pattern_a = arms[0].cmp == Comparator::LE && arms[0].identity &&
                   arms[1].cmp == Comparator::GT && !arms[1].identity;
  bool pattern_b = arms[0].cmp == Comparator::GE && !arms[0].identity &&
                   arms[1].cmp == Comparator::LT && arms[1].identity;
  if (!pattern_a && !pattern_b) return std::nullopt;
  return ClampMatch{arms[0].field, ClampConst(arms[0].bound)};
}

bool ContainsKind(const Expression& e, Kind k) {
  if (e.kind() == k) return true;
  switch (e.kind()) {
    case Kind::Not:
    case Kind::Star:
      return ContainsKind(e.body(), k);
    case Kind::Union:
    case Kind::Seq:
      return ContainsKind(e.left(), k) || ContainsKind(e.right(), k);
    default:
      return false;
  }
}

bool ContainsConstAssign(const Expression& e) {
  switch (e.kind()) {
    case Kind::QAssign:
      return e.term().is_constant();
    case Kind::Not:
    case Kind::Star:
      return ContainsConstAssign(e.body());
    case Kind::Union:
    case Kind::Seq:
      return ContainsConstAssign(e.left()) || ContainsConstAssign(e.right());
    default:
      return false;
  }
}

// Which dup-free path classes exist through a node, ignoring guards:
// weightless and weighted. Paths through a dup are never dup-free, so they
// fall out of both classes.
struct PathFacts {
  bool weightless = false;
  bool weighted = false;
};

class Classifier {
 public:
  Classifier(StructureKind structure, const FieldUniverse& universe)
      : universe_(universe),
        structure_(structure),
        additive_(structure == StructureKind::MinPlus ||
                  structure == StructureKind::MaxPlus) {}

  ClassifyResult Run(const Expression& e) {
    PathFacts facts;
    if (!Walk(e, false, &facts)) return {std::nullopt, refusal_};
    if (!tracked_.has_value()) {
      return {std::nullopt, "no quantitative variable to track"};
    }
    if (!FinGrainChecks(e)) return {std::nullopt, refusal_};
    return {WeightRegular{e, structure_, *tracked_, threshold_}, ""};
  }

 private:
  bool Fail(std::string r) {
    if (refusal_.empty()) refusal_ = std::move(r);
    return false;
  }

  bool Track(const FieldId& f) {
    if (f.kind != FieldKind::Quantitative) {
      return Fail("non-quantitative field '" + f.name +
                  "' in a quantitative atom");
    }
    if (f.scope == FieldScope::SwitchVar) {
      return Fail("switch-scoped variable '" + f.name + "'");
    }
    if (tracked_.has_value() && !(*tracked_ == f)) {
      return Fail("second quantitative variable '" + f.name + "'");
    }
    if (!tracked_.has_value()) tracked_ = f;
    return true;
  }

  bool NoteThreshold(Comparator cmp, const Weight& k) {
    if (cmp == Comparator::EQ) {
      return Fail("equality comparison on the tracked variable");
    }
    if (threshold_.has_value() &&
        !(threshold_->first == cmp && threshold_->second == k)) {
      return Fail("conflicting quantitative comparisons");
    }
    threshold_ = {cmp, k};
    ++occurrences_;
    return true;
  }

  bool Walk(const Expression& e, bool in_star, PathFacts* out) {
    switch (e.kind()) {
      case Kind::Drop:
        return true;
      case Kind::Skip:
      case Kind::Dup:
      case Kind::TestEq:
      case Kind::Assign:
        out->weightless = e.kind() != Kind::Dup;
        return true;
      case Kind::Enq:
      case Kind::Deq:
        return Fail("queue operation");
      case Kind::QTest: {
        if (!Track(e.field())) return false;
        if (!e.term().is_constant()) {
          return Fail("comparison against a non-constant term");
        }
        if (!NoteThreshold(e.cmp(), ClampConst(e.term().constant))) {
          return false;
        }
        out->weightless = true;
        return true;
      }
      case Kind::QAssign: {
        if (!Track(e.field())) return false;
        const LinearTerm& t = e.term();
        if (t.is_constant()) {
          if (in_star) return Fail("constant assignment inside a loop");
          out->weightless = true;
          return true;
        }
        for (const auto& [name, coeff] : t.coeffs) {
          if (name != tracked_->name) {
            return Fail("second quantitative variable '" + name + "'");
          }
          if (coeff != 1) return Fail("scaled update");
        }
        if (IsIdentityTerm(t, tracked_->name)) {
          out->weightless = true;
          return true;
        }
        if (!additive_) {
          return Fail("additive update under a clamping structure");
        }
        if (t.constant.is_negative()) return Fail("subtractive update");
        out->weighted = true;
        return true;
      }
      case Kind::Not: {
        if (ContainsKind(e.body(), Kind::QTest) ||
            ContainsKind(e.body(), Kind::QAssign)) {
          return Fail("negated quantitative atom");
        }
        out->weightless = true;
        return true;
      }
      case Kind::Union: {
        if (auto m = MatchClamp(e)) {
          if (!Track(m->field)) return false;
          if (additive_) {
            return Fail("clamping update under an additive structure");
          }
          out->weighted = true;
          return true;
        }
        PathFacts l, r;
        if (!Walk(e.left(), in_star, &l) || !Walk(e.right(), in_star, &r)) {
          return false;
        }
        out->weightless = l.weightless || r.weightless;
        out->weighted = l.weighted || r.weighted;
        return true;
      }
      case Kind::Seq: {
        PathFacts l, r;
        if (!Walk(e.left(), in_star, &l) || !Walk(e.right(), in_star, &r)) {
          return false;
        }
        out->weightless = l.weightless && r.weightless;
        out->weighted = (l.weighted && (r.weightless || r.weighted)) ||
                        (l.weightless && r.weighted);
        return true;
      }
      case Kind::Star: {
        PathFacts body;
        if (!Walk(e.body(), true, &body)) return false;
        if (body.weighted) {
          return Fail("weight update inside an observation-free loop");
        }
        out->weightless = true;
        return true;
      }
    }
    return Fail("unsupported construct");
  }

  bool FinGrainChecks(const Expression& e) {
    std::vector<Expression> factors = SeqFactors(e);
    if (threshold_.has_value()) {
      const Expression& last = factors.back();
      bool final_is_threshold =
          last.kind() == Kind::QTest && last.field() == *tracked_ &&
          last.cmp() == threshold_->first && last.term().is_constant() &&
          ClampConst(last.term().constant) == threshold_->second;
      if (!final_is_threshold) {
        return Fail("comparison is not the final factor");
      }
      if (occurrences_ >= 2) {
        Comparator cmp = threshold_->first;
        bool lower = cmp == Comparator::GE || cmp == Comparator::GT;
        if (additive_ && lower) {
          return Fail("pruning direction incompatible with the structure");
        }
        if (!additive_ && !lower) {
          return Fail("pruning direction incompatible with the structure");
        }
      }
    }
    bool seen_dup = false;
    for (const Expression& f : factors) {
      if (ContainsConstAssign(f) && seen_dup) {
        return Fail("constant assignment past the first observation point");
      }
      seen_dup = seen_dup || ContainsKind(f, Kind::Dup);
    }
    return true;
  }

  const FieldUniverse& universe_;
  StructureKind structure_;
  bool additive_;
  std::optional<FieldId> tracked_;
  std::optional<std::pair<Comparator, Weight>> threshold_;
  int occurrences_ = 0;
  std::string refusal_;
};

// ---------------------------------------------------------------------------
// Position graph. One edge kind per atom; observation points (dup) delimit
// the chunks a transition composes. A dup edge always sits alone on a fresh
// node, so stopping the closure at dup-bearing nodes is exact.

struct Edge {
  enum Kind { kEps, kGuard, kAssign, kDup, kWeight, kEntry, kThreshold } kind;
  int to = 0;
  int guard = -1;      // index into Graph::guards
  std::string field;   // kAssign
  std::string symbol;  // kAssign
  Weight w = Weight::integer(0);
};

struct Graph {
  std::vector<std::vector<Edge>> out;
  std::vector<Expression> guards;
  int start = 0;
  int accept = 0;

  int New() {
    out.emplace_back();
    return static_cast<int>(out.size()) - 1;
  }
  bool DupBearing(int q) const {
    for (const Edge& e : out[q]) {
      if (e.kind == Edge::kDup) return true;
    }
    return false;
  }
};

class GraphBuilder {
 public:
  GraphBuilder(const WeightRegular& wr, const WeightStructure& ops)
      : wr_(wr), ops_(ops) {}

  Graph Build() {
    auto [s, t] = Frag(wr_.expr);
    g_.start = s;
    g_.accept = t;
    return std::move(g_);
  }

 private:
  std::pair<int, int> Frag(const Expression& e) {
    int s = g_.New();
    int t = g_.New();
    switch (e.kind()) {
      case Kind::Drop:
        break;
      case Kind::Skip:
        g_.out[s].push_back({Edge::kEps, t});
        break;
      case Kind::Dup:
        g_.out[s].push_back({Edge::kDup, t});
        break;
      case Kind::TestEq:
      case Kind::Not:
        g_.guards.push_back(e);
        g_.out[s].push_back(
            {Edge::kGuard, t, static_cast<int>(g_.guards.size()) - 1});
        break;
      case Kind::Assign:
        g_.out[s].push_back({Edge::kAssign, t, -1, e.field().name,
                             std::get<std::string>(e.value())});
        break;
      case Kind::QTest:
        g_.out[s].push_back({Edge::kThreshold, t});
        break;
      case Kind::QAssign: {
        const LinearTerm& term = e.term();
        Edge edge{Edge::kWeight, t};
        if (term.is_constant()) {
          edge.kind = Edge::kEntry;
          edge.w = ClampConst(term.constant);
        } else if (IsIdentityTerm(term, wr_.tracked.name)) {
          edge.w = ops_.one();
        } else {
          edge.w = ClampConst(term.constant);
        }
        g_.out[s].push_back(edge);
        break;
      }
      case Kind::Union: {
        if (auto m = MatchClamp(e)) {
          g_.out[s].push_back({Edge::kWeight, t, -1, "", "", m->bound});
          break;
        }
        auto [ls, lt] = Frag(e.left());
        auto [rs, rt] = Frag(e.right());
        g_.out[s].push_back({Edge::kEps, ls});
        g_.out[s].push_back({Edge::kEps, rs});
        g_.out[lt].push_back({Edge::kEps, t});
        g_.out[rt].push_back({Edge::kEps, t});
        break;
      }
      case Kind::Seq: {
        auto [ls, lt] = Frag(e.left());
        auto [rs, rt] = Frag(e.right());
        g_.out[s].push_back({Edge::kEps, ls});
        g_.out[lt].push_back({Edge::kEps, rs});
        g_.out[rt].push_back({Edge::kEps, t});
        break;
      }
      case Kind::Star: {
        auto [bs, bt] = Frag(e.body());
        g_.out[s].push_back({Edge::kEps, t});
        g_.out[s].push_back({Edge::kEps, bs});
        g_.out[bt].push_back({Edge::kEps, t});
        g_.out[bt].push_back({Edge::kEps, bs});
        break;
      }
      case Kind::Enq:
      case Kind::Deq:
        throw std::invalid_argument("queue operation in a classified term");
    }
    return {s, t};
  }

  const WeightRegular& wr_;
  const WeightStructure& ops_;
  Graph g_;
};

bool PredOnAtom(const Expression& p, const Atom& a) {
  switch (p.kind()) {
    case Kind::Skip:
      return true;
    case Kind::Drop:
      return false;
    case Kind::TestEq: {
      auto it = a.find(p.field().name);
      return it != a.end() && it->second == std::get<std::string>(p.value());
    }
    case Kind::Not:
      return !PredOnAtom(p.body(), a);
    case Kind::Union:
      return PredOnAtom(p.left(), a) || PredOnAtom(p.right(), a);
    case Kind::Seq:
      return PredOnAtom(p.left(), a) && PredOnAtom(p.right(), a);
    default:
      throw std::invalid_argument("non-predicate inside a guard");
  }
}

void CollectMentions(const Expression& e,
                     std::map<std::string, std::set<std::string>>& dom) {
  switch (e.kind()) {
    case Kind::TestEq:
    case Kind::Assign:
      dom[e.field().name].insert(std::get<std::string>(e.value()));
      return;
    case Kind::Not:
    case Kind::Star:
      CollectMentions(e.body(), dom);
      return;
    case Kind::Union:
    case Kind::Seq:
      CollectMentions(e.left(), dom);
      CollectMentions(e.right(), dom);
      return;
    default:
      return;
  }
}

std::vector<Atom> BuildAtoms(const Expression& e, const FieldUniverse& universe,
                             std::size_t cap) {
  std::map<std::string, std::set<std::string>> dom;
  CollectMentions(e, dom);
  for (auto& [name, values] : dom) {
    if (universe.is_declared(name)) {
      for (const std::string& s : universe.domain(name)) values.insert(s);
    }
  }
  std::vector<Atom> atoms{Atom{}};
  for (const auto& [name, values] : dom) {
    std::vector<Atom> next;
    for (const Atom& a : atoms) {
      for (const std::string& v : values) {
        Atom b = a;
        b[name] = v;
        next.push_back(std::move(b));
        if (next.size() > cap) {
          throw std::invalid_argument("state cap exceeded");
        }
      }
    }
    atoms = std::move(next);
  }
  return atoms;
}

struct Carry {
  std::optional<Weight> abs;  // last constant assignment on the path
  Weight rel;                 // extension composed after it
};

class Machine {
 public:
  Machine(const Graph& g, const std::vector<Atom>& atoms,
          const WeightStructure& ops, bool merge_max)
      : g_(g), atoms_(atoms), ops_(ops), merge_max_(merge_max) {
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
      atom_idx_.emplace(atoms_[i], static_cast<int>(i));
    }
  }

  Weight Merge(const Weight& a, const Weight& b) const {
    if (ops_.kind() == StructureKind::AddMin) {
      return merge_max_ ? a.max(b) : a.min(b);
    }
    return ops_.plus(a, b);
  }

  // Guard-filtered epsilon closure over everything but dup edges, with the
  // carried weight merged per configuration. Terminates because merges are
  // selective and dup-free cycles carry no weight.
  std::map<std::pair<int, int>, Carry> Close(int node, int atom, Carry seed,
                                             bool entry_phase) const {
    std::map<std::pair<int, int>, Carry> best;
    std::deque<std::pair<int, int>> work;
    best[{node, atom}] = std::move(seed);
    work.push_back({node, atom});
    while (!work.empty()) {
      auto [q, ai] = work.front();
      work.pop_front();
      Carry cur = best.at({q, ai});
      for (const Edge& e : g_.out[q]) {
        if (e.kind == Edge::kDup) continue;
        Carry nxt = cur;
        int bi = ai;
        if (e.kind == Edge::kGuard) {
          if (!PredOnAtom(g_.guards[e.guard], atoms_[ai])) continue;
        } else if (e.kind == Edge::kAssign) {
          Atom moved = atoms_[ai];
          moved[e.field] = e.symbol;
          auto it = atom_idx_.find(moved);
          if (it == atom_idx_.end()) continue;  // symbol outside the alphabet
          bi = it->second;
        } else if (e.kind == Edge::kWeight) {
          nxt.rel = ops_.times(nxt.rel, e.w);
        } else if (e.kind == Edge::kEntry) {
          if (!entry_phase) {
            throw std::invalid_argument(
                "constant assignment past the first observation point");
          }
          nxt.abs = e.w;
          nxt.rel = ops_.one();
        }
        auto key = std::make_pair(e.to, bi);
        auto it = best.find(key);
        if (it == best.end()) {
          best.emplace(key, std::move(nxt));
          work.push_back(key);
          continue;
        }
        Carry& old = it->second;
        if (nxt.abs.has_value() && old.abs.has_value() &&
            !(*nxt.abs == *old.abs)) {
          throw std::invalid_argument("non-uniform entry weight");
        }
        std::optional<Weight> mabs = old.abs.has_value() ? old.abs : nxt.abs;
        Weight mrel = Merge(old.rel, nxt.rel);
        if (!(mabs == old.abs && mrel == old.rel)) {
          old = Carry{std::move(mabs), std::move(mrel)};
          work.push_back(key);
        }
      }
    }
    return best;
  }

 private:
  const Graph& g_;
  const std::vector<Atom>& atoms_;
  const WeightStructure& ops_;
  bool merge_max_;
  std::map<Atom, int> atom_idx_;
};

struct FlatEdge {
  int from;
  int to;
  Weight w;
};

std::vector<FlatEdge> NonzeroEdges(const WeightedAutomaton& a,
                                   const Weight& zero) {
  std::vector<FlatEdge> edges;
  for (const auto& [key, w] : a.trans) {
    if (w == zero) continue;
    edges.push_back({std::get<0>(key), std::get<3>(key), w});
  }
  return edges;
}

std::vector<bool> ReachesFinal(const WeightedAutomaton& a,
                               const std::vector<FlatEdge>& edges) {
  std::vector<std::vector<int>> rev(a.state_count);
  for (const FlatEdge& e : edges) rev[e.to].push_back(e.from);
  std::vector<bool> seen(a.state_count, false);
  std::deque<int> work;
  for (std::size_t s = 0; s < a.state_count; ++s) {
    if (a.final[s]) {
      seen[s] = true;
      work.push_back(static_cast<int>(s));
    }
  }
  while (!work.empty()) {
    int s = work.front();
    work.pop_front();
    for (int p : rev[s]) {
      if (!seen[p]) {
        seen[p] = true;
        work.push_back(p);
      }
    }
  }
  return seen;
}

struct BfResult {
  std::vector<std::optional<Weight>> val;
  bool diverges = false;
};

// Generalized Bellman-Ford toward the requested extremum. Selective
// structures converge within a bounded number of rounds; under an additive
// extension an improvement that persists past every simple path length and
// reaches a final state is an improving cycle.
BfResult RunBf(const WeightedAutomaton& a, const std::vector<FlatEdge>& edges,
               const WeightStructure& ops, const Weight& lambda,
               bool maximize) {
  BfResult r;
  r.val.assign(a.state_count, std::nullopt);
  if (a.state_count == 0) return r;
  r.val[a.start] = lambda;
  const Weight zero = ops.zero();
  bool additive = ops.kind() == StructureKind::MinPlus ||
                  ops.kind() == StructureKind::MaxPlus;
  auto better = [&](const Weight& cand, const std::optional<Weight>& old) {
    if (!old.has_value()) return true;
    return maximize ? cand > *old : cand < *old;
  };
  auto relax = [&]() {
    bool improved = false;
    for (const FlatEdge& e : edges) {
      if (!r.val[e.from].has_value()) continue;
      Weight cand = ops.times(*r.val[e.from], e.w);
      if (cand == zero) continue;
      if (better(cand, r.val[e.to])) {
        r.val[e.to] = cand;
        improved = true;
      }
    }
    return improved;
  };
  std::size_t limit = additive
                          ? a.state_count + 1
                          : a.state_count * (edges.size() + 2) + 2;
  bool improving = true;
  for (std::size_t round = 0; improving && round < limit; ++round) {
    improving = relax();
  }
  if (improving) {
    std::vector<bool> reaches = ReachesFinal(a, edges);
    for (const FlatEdge& e : edges) {
      if (!r.val[e.from].has_value()) continue;
      Weight cand = ops.times(*r.val[e.from], e.w);
      if (cand != zero && better(cand, r.val[e.to]) && reaches[e.to]) {
        r.diverges = true;
        break;
      }
    }
  }
  return r;
}

std::optional<Weight> FindEntryConst(const Expression& e) {
  switch (e.kind()) {
    case Kind::QAssign:
      if (e.term().is_constant()) return ClampConst(e.term().constant);
      return std::nullopt;
    case Kind::Not:
    case Kind::Star: {
      return FindEntryConst(e.body());
    }
    case Kind::Union:
    case Kind::Seq: {
      if (auto l = FindEntryConst(e.left())) return l;
      return FindEntryConst(e.right());
    }
    default:
      return std::nullopt;
  }
}

}  // namespace

std::string to_string(const Atom& a) {
  if (a.empty()) return "T";
  std::string out;
  for (const auto& [f, v] : a) {
    if (!out.empty()) out += ";";
    out += f + "=" + v;
  }
  return out;
}

ClassifyResult classify_weight_regular(const Expression& e,
                                       StructureKind structure,
                                       const FieldUniverse& universe) {
  return Classifier(structure, universe).Run(e);
}

WeightedAutomaton expr_to_wfa(const WeightRegular& wr,
                              const FieldUniverse& universe,
                              std::size_t state_cap) {
  WeightStructure ops = make_structure(wr.structure);
  Graph g = GraphBuilder(wr, ops).Build();
  std::vector<Atom> atoms = BuildAtoms(wr.expr, universe, state_cap);

  WeightedAutomaton a;
  a.structure = wr.structure;
  a.tracked = wr.tracked.name;
  a.threshold = wr.threshold;
  a.atoms = atoms;
  a.start = 0;

  bool merge_max = true;
  if (wr.threshold.has_value()) {
    Comparator cmp = wr.threshold->first;
    merge_max = cmp == Comparator::GE || cmp == Comparator::GT;
  }
  Machine m(g, atoms, ops, merge_max);

  std::map<std::pair<int, int>, int> sid;
  std::vector<std::pair<int, int>> snodes{{-1, -1}};  // start state
  std::vector<bool> fin{false};
  std::deque<int> pend;
  auto GetState = [&](int q, int ai) {
    auto it = sid.find({q, ai});
    if (it != sid.end()) return it->second;
    if (snodes.size() >= state_cap) {
      throw std::invalid_argument("state cap exceeded");
    }
    int id = static_cast<int>(snodes.size());
    sid[{q, ai}] = id;
    snodes.push_back({q, ai});
    fin.push_back(q == g.accept);
    if (q != g.accept) pend.push_back(id);
    return id;
  };
  auto AddTrans = [&](int from, int la, int lb, int to, const Weight& w) {
    auto key = std::make_tuple(from, la, lb, to);
    auto it = a.trans.find(key);
    if (it == a.trans.end()) {
      a.trans.emplace(key, w);
    } else {
      it->second = m.Merge(it->second, w);
    }
  };
  auto ChunkTargets = [&](int from_node, int atom, auto&& emit) {
    for (const Edge& e : g.out[from_node]) {
      if (e.kind != Edge::kDup) continue;
      auto chunk = m.Close(e.to, atom, Carry{std::nullopt, ops.one()}, false);
      for (const auto& [cfg, carry] : chunk) {
        auto [q2, a2] = cfg;
        if (q2 == g.accept || g.DupBearing(q2)) emit(q2, a2, carry.rel);
      }
    }
  };

  std::set<Weight> abs_seen;
  for (std::size_t ai = 0; ai < atoms.size(); ++ai) {
    int alpha = static_cast<int>(ai);
    auto entry =
        m.Close(g.start, alpha, Carry{std::nullopt, ops.one()}, true);
    for (const auto& [cfg, carry] : entry) {
      auto [q, pi] = cfg;
      if (q == g.accept) {
        if (carry.abs.has_value()) abs_seen.insert(*carry.abs);
        a.zero_hops.push_back(ZeroHop{alpha, pi, carry.rel});
      } else if (g.DupBearing(q)) {
        if (carry.abs.has_value()) abs_seen.insert(*carry.abs);
        Weight pre = carry.rel;
        ChunkTargets(q, pi, [&](int q2, int a2, const Weight& post) {
          int tgt = GetState(q2, a2);
          a.entry_detail.push_back(EntryTransition{alpha, pi, pre, post, tgt});
          AddTrans(0, alpha, a2, tgt, ops.times(pre, post));
        });
      }
    }
  }
  if (abs_seen.size() > 1) {
    throw std::invalid_argument("non-uniform entry weight");
  }
  a.entry = abs_seen.empty() ? ops.one() : *abs_seen.begin();

  while (!pend.empty()) {
    int s = pend.front();
    pend.pop_front();
    auto [q, ai] = snodes[s];
    ChunkTargets(q, ai, [&](int q2, int a2, const Weight& w) {
      AddTrans(s, ai, a2, GetState(q2, a2), w);
    });
  }

  a.state_count = snodes.size();
  a.final = fin;
  std::sort(a.entry_detail.begin(), a.entry_detail.end());
  std::sort(a.zero_hops.begin(), a.zero_hops.end());
  return a;
}

Expression wfa_to_expr(const WeightedAutomaton& a,
                       const FieldUniverse& universe, int max_len) {
  WeightStructure ops = make_structure(a.structure);
  const FieldId& tf = universe.field(a.tracked);
  const Weight lambda = a.entry;

  std::vector<int> satom(a.state_count, -1);
  for (const auto& [key, w] : a.trans) {
    satom[std::get<3>(key)] = std::get<2>(key);
    if (std::get<0>(key) != a.start) satom[std::get<0>(key)] = std::get<1>(key);
  }

  auto SetTracked = [&](const Weight& v) {
    if (v.is_infinite()) {
      throw std::invalid_argument("infinite tracked value in a rendering");
    }
    return Expression::QAssign(tf, LinearTerm::constant_weight(v));
  };
  auto PushTests = [&](std::vector<Expression>& fs, const Atom& atom) {
    for (const auto& [f, v] : atom) {
      fs.push_back(Expression::Test(universe.field(f), symbol(v)));
    }
  };
  auto PushAssigns = [&](std::vector<Expression>& fs, const Atom& atom) {
    for (const auto& [f, v] : atom) {
      fs.push_back(Expression::Assign(universe.field(f), symbol(v)));
    }
  };
  std::optional<Expression> thr;
  if (a.threshold.has_value()) {
    thr = Expression::QTest(
        tf, a.threshold->first,
        LinearTerm::constant_weight(a.threshold->second));
  }

  std::vector<Expression> branches;
  auto Emit = [&](std::vector<Expression> fs) {
    if (thr.has_value()) fs.push_back(*thr);
    branches.push_back(NArySeq(fs));
  };

  for (const ZeroHop& zh : a.zero_hops) {
    std::vector<Expression> fs;
    PushTests(fs, a.atoms[zh.alpha]);
    fs.push_back(SetTracked(lambda));
    PushAssigns(fs, a.atoms[zh.final_atom]);
    fs.push_back(SetTracked(ops.times(lambda, zh.pre)));
    Emit(std::move(fs));
  }

  std::function<void(int, const Weight&, std::vector<Expression>, int)>
      extend = [&](int s, const Weight& v, std::vector<Expression> fs,
                   int used) {
        if (a.final[s]) {
          Emit(fs);
          return;  // final states have no outgoing transitions
        }
        if (used >= max_len) return;
        for (const auto& [key, w] : a.trans) {
          if (std::get<0>(key) != s) continue;
          Weight nv = ops.times(v, w);
          std::vector<Expression> child = fs;
          child.push_back(Expression::Dup());
          PushAssigns(child, a.atoms[std::get<2>(key)]);
          child.push_back(SetTracked(nv));
          extend(std::get<3>(key), nv, std::move(child), used + 1);
        }
      };

  for (const EntryTransition& et : a.entry_detail) {
    if (max_len < 1) break;
    Weight v1 = ops.times(lambda, et.pre);
    Weight v2 = ops.times(v1, et.post);
    std::vector<Expression> fs;
    PushTests(fs, a.atoms[et.alpha]);
    fs.push_back(SetTracked(lambda));
    PushAssigns(fs, a.atoms[et.p0]);
    fs.push_back(SetTracked(v1));
    fs.push_back(Expression::Dup());
    PushAssigns(fs, a.atoms[satom[et.target]]);
    fs.push_back(SetTracked(v2));
    extend(et.target, v2, std::move(fs), 1);
  }

  if (branches.empty()) return Expression::Drop();
  return NAryUnion(branches);
}

std::set<ReducedString> reduce(const WeightRegular& wr,
                               const FieldUniverse& universe, int max_dups,
                               std::optional<Weight> omega) {
  WeightStructure ops = make_structure(wr.structure);
  Weight probe =
      omega.has_value()
          ? *omega
          : FindEntryConst(wr.expr).value_or(ops.one());
  std::map<std::string, std::set<std::string>> dom;
  CollectMentions(wr.expr, dom);
  for (auto& [name, values] : dom) {
    if (universe.is_declared(name)) {
      for (const std::string& s : universe.domain(name)) values.insert(s);
    }
  }

  std::vector<Atom> atoms{Atom{}};
  for (const auto& [name, values] : dom) {
    std::vector<Atom> next;
    for (const Atom& a : atoms) {
      for (const std::string& v : values) {
        Atom b = a;
        b[name] = v;
        next.push_back(std::move(b));
      }
    }
    atoms = std::move(next);
  }

  std::set<ReducedString> out;
  EvalConfig cfg{std::max(16, 4 * (max_dups + 2)), EvalMode::PerWorld};
  for (const Atom& alpha : atoms) {
    World w = initial_world(universe);
    for (const auto& [f, v] : alpha) packet_write(w, universe, f, symbol(v));
    packet_write(w, universe, wr.tracked.name, quantity(probe));
    EvalResult r = evaluate(wr.expr, w, universe, cfg);
    for (const World& rw : r.worlds) {
      if (rw.history.size() > static_cast<std::size_t>(max_dups) + 1) continue;
      ReducedString rs;
      rs.alpha = alpha;
      rs.omega = probe;
      for (auto it = rw.history.rbegin(); it != rw.history.rend(); ++it) {
        Atom seg;
        for (const auto& [f, v] : alpha) {
          seg[f] = std::get<std::string>(it->fields.at(f));
        }
        rs.segments.emplace_back(
            std::move(seg), std::get<Weight>(it->fields.at(wr.tracked.name)));
      }
      out.insert(std::move(rs));
    }
  }
  return out;
}

bool emptiness(const WeightedAutomaton& a) {
  WeightStructure ops = make_structure(a.structure);
  const Weight zero = ops.zero();
  const Weight lambda = a.entry;
  std::vector<FlatEdge> edges = NonzeroEdges(a, zero);

  if (!a.threshold.has_value()) {
    if (lambda == zero) return true;
    for (const ZeroHop& zh : a.zero_hops) {
      if (ops.times(lambda, zh.pre) != zero) return false;
    }
    std::vector<bool> seen(a.state_count, false);
    std::deque<int> work{a.start};
    seen[a.start] = true;
    while (!work.empty()) {
      int s = work.front();
      work.pop_front();
      if (a.final[s]) return false;
      for (const FlatEdge& e : edges) {
        if (e.from == s && !seen[e.to]) {
          seen[e.to] = true;
          work.push_back(e.to);
        }
      }
    }
    return true;
  }

  auto [cmp, k] = *a.threshold;
  bool maximize = cmp == Comparator::GE || cmp == Comparator::GT;
  std::optional<Weight> best;
  auto pick = [&](const Weight& v) {
    if (!best.has_value() || (maximize ? v > *best : v < *best)) best = v;
  };
  if (lambda != zero) {
    for (const ZeroHop& zh : a.zero_hops) {
      Weight v = ops.times(lambda, zh.pre);
      if (v != zero) pick(v);
    }
    BfResult bf = RunBf(a, edges, ops, lambda, maximize);
    if (bf.diverges && maximize) return false;  // grows past any bound
    for (std::size_t s = 0; s < a.state_count; ++s) {
      if (a.final[s] && bf.val[s].has_value()) pick(*bf.val[s]);
    }
  }
  if (!best.has_value()) return true;
  return !compare(*best, cmp, k);
}

OptimalWeight optimal_weight(const WeightedAutomaton& a) {
  WeightStructure ops = make_structure(a.structure);
  if (!ops.idempotent_plus()) {
    return {std::nullopt,
            "plus is not selective under add-min; the combined path weight "
            "is not a path value"};
  }
  const Weight zero = ops.zero();
  const Weight lambda = a.entry;
  std::vector<FlatEdge> edges = NonzeroEdges(a, zero);
  std::optional<Weight> acc;
  auto fold = [&](const Weight& v) {
    acc = acc.has_value() ? ops.plus(*acc, v) : v;
  };
  if (lambda != zero) {
    for (const ZeroHop& zh : a.zero_hops) {
      Weight v = ops.times(lambda, zh.pre);
      if (v != zero) fold(v);
    }
    bool maximize = a.structure == StructureKind::MaxPlus ||
                    a.structure == StructureKind::MaxMin;
    BfResult bf = RunBf(a, edges, ops, lambda, maximize);
    if (bf.diverges) {
      return {std::nullopt,
              "diverges: an improving cycle reaches an accepting state"};
    }
    for (std::size_t s = 0; s < a.state_count; ++s) {
      if (a.final[s] && bf.val[s].has_value()) fold(*bf.val[s]);
    }
  }
  if (!acc.has_value()) return {zero, "no accepting path"};
  return {*acc, ""};
}

std::string export_automaton(const WeightedAutomaton& a) {
  std::ostringstream os;
  os << "structure: " << to_string(a.structure) << "\n";
  os << "tracked: " << a.tracked << "\n";
  os << "states: " << a.state_count << "\n";
  os << "start: " << a.start << "\n";
  os << "final:";
  bool any_final = false;
  for (std::size_t s = 0; s < a.state_count; ++s) {
    if (a.final[s]) {
      os << " " << s;
      any_final = true;
    }
  }
  if (!any_final) os << " none";
  os << "\n";
  os << "entry: " << a.entry.to_string() << "\n";
  if (a.threshold.has_value()) {
    os << "threshold: " << to_string(a.threshold->first) << " "
       << a.threshold->second.to_string() << "\n";
  }
  for (const auto& [key, w] : a.trans) {
    os << std::get<0>(key) << " -- (" << to_string(a.atoms[std::get<1>(key)])
       << "," << to_string(a.atoms[std::get<2>(key)]) << ") / "
       << w.to_string() << " --> " << std::get<3>(key) << "\n";
  }
  for (const ZeroHop& zh : a.zero_hops) {
    os << "accept: (" << to_string(a.atoms[zh.alpha]) << ") / "
       << zh.pre.to_string() << " --> (" << to_string(a.atoms[zh.final_atom])
       << ")\n";
  }
  return os.str();
}

}  // namespace wnetkat

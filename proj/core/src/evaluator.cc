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

#include "wnetkat/evaluator.h"

#include <deque>
#include <map>
#include <utility>

namespace wnetkat {
namespace {

Weight ReadQuantValue(const World& w, const FieldUniverse& universe,
                      const FieldId& f) {
  if (f.scope == FieldScope::PacketVar) {
    const Value& v = packet_read(w, universe, f.name);
    if (!std::holds_alternative<Weight>(v)) {
      throw EvalError("field '" + f.name + "' holds a symbol, not a weight");
    }
    return std::get<Weight>(v);
  }
  std::optional<Value> v = state_read(w, universe, f.name);
  if (!v.has_value()) {
    throw EvalError("switch variable '" + f.name + "' read before assignment at " +
                    current_switch(w));
  }
  if (!std::holds_alternative<Weight>(*v)) {
    throw EvalError("switch variable '" + f.name + "' holds a symbol");
  }
  return std::get<Weight>(*v);
}

// Signed evaluation of a linear term with clamping at zero: negative totals
// collapse to 0, an infinite positive contribution dominates any finite
// subtraction, and opposing infinite contributions are an error.
Weight EvalTerm(const LinearTerm& t, const World& w,
                const FieldUniverse& universe) {
  Rational pos = t.constant.is_negative() ? Rational(0) : t.constant;
  Rational neg = t.constant.is_negative() ? -t.constant : Rational(0);
  bool pos_inf = false;
  bool neg_inf = false;
  for (const auto& [name, coeff] : t.coeffs) {
    if (!universe.is_declared(name)) {
      throw EvalError("undeclared variable '" + name + "'");
    }
    Weight value = ReadQuantValue(w, universe, universe.field(name));
    if (value.is_infinite()) {
      (coeff > 0 ? pos_inf : neg_inf) = true;
      continue;
    }
    Rational scaled = value.finite() * Rational(coeff > 0 ? coeff : -coeff);
    (coeff > 0 ? pos : neg) = (coeff > 0 ? pos : neg) + scaled;
  }
  if (pos_inf && neg_inf) {
    throw EvalError("infinite terms of opposite sign in one expression");
  }
  if (pos_inf) return Weight::infinity();
  if (neg_inf) return Weight::integer(0);
  Rational total = pos - neg;
  if (total.is_negative()) return Weight::integer(0);
  return Weight::from_rational(total);
}

void SetQuantValue(World& w, const FieldUniverse& universe, const FieldId& f,
                   Weight value) {
  if (f.scope == FieldScope::PacketVar) {
    packet_write(w, universe, f.name, quantity(std::move(value)));
  } else {
    state_write(w, universe, f.name, quantity(std::move(value)));
  }
}

struct Evaluator {
  const FieldUniverse& universe;
  int fuel;

  EvalResult Eval(const Expression& e, const World& w) const {
    using K = Expression::Kind;
    EvalResult out;
    switch (e.kind()) {
      case K::Drop:
        return out;
      case K::Skip:
        out.worlds.insert(w);
        return out;
      case K::Dup: {
        World next = w;
        next.history.insert(next.history.begin(), next.history.front());
        out.worlds.insert(std::move(next));
        return out;
      }
      case K::TestEq: {
        if (packet_read(w, universe, e.field().name) == e.value()) {
          out.worlds.insert(w);
        }
        return out;
      }
      case K::Assign: {
        World next = w;
        packet_write(next, universe, e.field().name, e.value());
        out.worlds.insert(std::move(next));
        return out;
      }
      case K::QAssign: {
        World next = w;
        SetQuantValue(next, universe, e.field(),
                      EvalTerm(e.term(), w, universe));
        out.worlds.insert(std::move(next));
        return out;
      }
      case K::QTest: {
        Weight lhs = ReadQuantValue(w, universe, e.field());
        Weight rhs = EvalTerm(e.term(), w, universe);
        if (compare(lhs, e.cmp(), rhs)) out.worlds.insert(w);
        return out;
      }
      case K::Not: {
        EvalResult body = Eval(e.body(), w);
        out.saturated = body.saturated;
        if (body.worlds.empty()) out.worlds.insert(w);
        return out;
      }
      case K::Union: {
        EvalResult a = Eval(e.left(), w);
        EvalResult b = Eval(e.right(), w);
        out.worlds = std::move(a.worlds);
        out.worlds.insert(b.worlds.begin(), b.worlds.end());
        out.saturated = a.saturated && b.saturated;
        return out;
      }
      case K::Seq: {
        EvalResult a = Eval(e.left(), w);
        out.saturated = a.saturated;
        for (const World& mid : a.worlds) {
          EvalResult b = Eval(e.right(), mid);
          out.saturated = out.saturated && b.saturated;
          out.worlds.insert(b.worlds.begin(), b.worlds.end());
        }
        return out;
      }
      case K::Star: {
        out.worlds.insert(w);
        std::set<World> frontier{w};
        for (int step = 0; step < fuel && !frontier.empty(); ++step) {
          std::set<World> next;
          for (const World& x : frontier) {
            EvalResult r = Eval(e.body(), x);
            out.saturated = out.saturated && r.saturated;
            for (const World& y : r.worlds) {
              if (!out.worlds.count(y)) next.insert(y);
            }
          }
          out.worlds.insert(next.begin(), next.end());
          frontier = std::move(next);
        }
        if (!frontier.empty()) out.saturated = false;
        return out;
      }
      case K::Enq: {
        World next = w;
        if (enqueue(next, universe, e.queue_switch(), e.queue_name())) {
          out.worlds.insert(std::move(next));
        }
        return out;
      }
      case K::Deq: {
        World next = w;
        dequeue(next, universe, e.queue_switch(), e.queue_name());
        out.worlds.insert(std::move(next));
        return out;
      }
    }
    return out;
  }
};

bool UsesQueues(const Expression& e) {
  using K = Expression::Kind;
  switch (e.kind()) {
    case K::Enq:
    case K::Deq:
      return true;
    case K::Not:
    case K::Star:
      return UsesQueues(e.body());
    case K::Union:
    case K::Seq:
      return UsesQueues(e.left()) || UsesQueues(e.right());
    default:
      return false;
  }
}

struct SharedItem {
  History history;
  std::deque<Expression> cont;
  int star_budget = 0;
};

}  // namespace

std::string to_string(DropOutcome outcome) {
  switch (outcome) {
    case DropOutcome::IsDrop: return "IsDrop";
    case DropOutcome::NotDrop: return "NotDrop";
    case DropOutcome::Unknown: return "Unknown";
  }
  return "Unknown";
}

EvalResult evaluate(const Expression& e, const World& w,
                    const FieldUniverse& universe, const EvalConfig& cfg) {
  if (cfg.mode == EvalMode::SharedState) {
    return run_shared(e, {w}, universe, cfg);
  }
  Evaluator ev{universe, cfg.fuel};
  return ev.Eval(e, w);
}

DropReport drop_check(const Expression& e, const std::vector<World>& inputs,
                      const FieldUniverse& universe, const EvalConfig& cfg) {
  DropReport report;
  // Queue-free expressions read only the head packet, so inputs differing
  // in history tails behave identically; one representative per projection
  // suffices and its results remain genuine witnesses.
  std::vector<const World*> todo;
  if (!UsesQueues(e)) {
    std::map<World, const World*> projected;
    for (const World& w : inputs) {
      World key{w.rho, {w.head()}, w.queues};
      projected.try_emplace(std::move(key), &w);
    }
    for (const auto& [key, w] : projected) todo.push_back(w);
  } else {
    for (const World& w : inputs) todo.push_back(&w);
  }

  bool all_saturated = true;
  for (const World* w : todo) {
    EvalResult r = evaluate(e, *w, universe, cfg);
    all_saturated = all_saturated && r.saturated;
    if (!r.worlds.empty()) {
      report.outcome = DropOutcome::NotDrop;
      report.witness = *r.worlds.begin();
      report.saturated = r.saturated;
      return report;
    }
  }
  report.saturated = all_saturated;
  report.outcome =
      all_saturated ? DropOutcome::IsDrop : DropOutcome::Unknown;
  return report;
}

EvalResult run_shared(const Expression& e, const std::vector<World>& seeds,
                      const FieldUniverse& universe, const EvalConfig& cfg) {
  EvalResult out;
  if (seeds.empty()) return out;

  SwitchValuation rho = seeds.front().rho;
  QueueStore queues = seeds.front().queues;
  std::deque<SharedItem> worklist;
  for (const World& seed : seeds) {
    worklist.push_back(SharedItem{seed.history, {e}, cfg.fuel});
  }
  const std::size_t cap =
      static_cast<std::size_t>(cfg.fuel) * seeds.size() + seeds.size();

  Evaluator atom_eval{universe, cfg.fuel};
  while (!worklist.empty()) {
    if (worklist.size() > cap) {
      out.saturated = false;
      return out;
    }
    SharedItem item = std::move(worklist.front());
    worklist.pop_front();

    bool alive = true;
    bool forked = false;
    while (alive && !forked) {
      if (item.cont.empty()) {
        out.worlds.insert(World{rho, item.history, queues});
        break;
      }
      Expression f = std::move(item.cont.front());
      item.cont.pop_front();
      using K = Expression::Kind;
      switch (f.kind()) {
        case K::Seq: {
          std::vector<Expression> factors = SeqFactors(f);
          for (auto it = factors.rbegin(); it != factors.rend(); ++it) {
            item.cont.push_front(*it);
          }
          break;
        }
        case K::Union: {
          // Left-to-right FIFO: every alternative becomes a worklist item
          // in order, so later packets observe earlier branches' state.
          for (const Expression& alt : UnionAlternatives(f)) {
            SharedItem child = item;
            child.cont.push_front(alt);
            worklist.push_back(std::move(child));
          }
          forked = true;
          break;
        }
        case K::Star: {
          SharedItem exit_child = item;
          worklist.push_back(std::move(exit_child));
          if (item.star_budget > 0) {
            SharedItem loop_child = item;
            loop_child.star_budget -= 1;
            loop_child.cont.push_front(f);
            loop_child.cont.push_front(f.body());
            worklist.push_back(std::move(loop_child));
          } else {
            out.saturated = false;
          }
          forked = true;
          break;
        }
        default: {
          // Atoms and predicates run against the shared state in place.
          World view{std::move(rho), std::move(item.history),
                     std::move(queues)};
          EvalResult r = atom_eval.Eval(f, view);
          if (r.worlds.empty()) {
            rho = std::move(view.rho);
            item.history = std::move(view.history);
            queues = std::move(view.queues);
            alive = false;
            break;
          }
          World next = *r.worlds.begin();
          rho = std::move(next.rho);
          item.history = std::move(next.history);
          queues = std::move(next.queues);
          break;
        }
      }
    }
  }
  return out;
}

}  // namespace wnetkat

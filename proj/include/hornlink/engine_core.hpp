#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <utility>

#include "hornlink/ast.hpp"
#include "hornlink/builtins.hpp"
#include "hornlink/errors.hpp"
#include "hornlink/generator.hpp"
#include "hornlink/unify.hpp"

namespace hornlink {

// One solution of the unbounded search. `steps` counts inference-rule
// applications along the successful derivation — the same arithmetic the
// bounded engine charges against its allowance, kept here so the two systems
// can be cross-checked.
struct Answer {
  Substitution subst;
  std::uint64_t steps = 0;
};

using SolutionStream = Generator<Answer>;

// Turns an unresolved page link into a resolved page implication on demand.
// Installed by the session so the engine itself never performs I/O.
using LinkResolver =
    std::function<GoalPtr(const std::string& origin, const GoalPtr& body)>;

struct SolveOptions {
  bool occurs_check = true;
  // Unbounded search can diverge; these caps abort it with SearchCapExceeded.
  std::shared_ptr<std::chrono::steady_clock::time_point> deadline;
  std::uint64_t max_depth = 500000;
  LinkResolver link_resolver;
  const BuiltinTable* builtins = &BuiltinTable::standard();
};

// Front-most definition for `name`, served in the role the caller demands.
// Atoms, macro references and conjunctions convert between the two roles;
// anything else in the wrong role is a program error, as is a missing name.
inline MacroDef lookup_macro(const PList<MacroDef>& macros,
                             const std::string& name, MacroBodyKind want) {
  for (const MacroDef& def : macros) {
    if (def.name != name) continue;
    if (def.kind == want) return def;
    if (want == MacroBodyKind::Goal) {
      if (auto g = clause_as_goal(def.clauses))
        return MacroDef{name, want, *g, nullptr};
      throw MacroKindMismatch(name, "goal");
    }
    if (auto c = goal_as_clause(def.goal))
      return MacroDef{name, want, nullptr, *c};
    throw MacroKindMismatch(name, "clause group");
  }
  throw MacroNotFound(name);
}

namespace detail_core {

struct EngineState {
  SolveOptions opts;
  FreshSource fresh;
};

inline void check_caps(const EngineState* st, std::uint64_t depth) {
  if (st->opts.deadline &&
      std::chrono::steady_clock::now() > *st->opts.deadline)
    throw SearchCapExceeded(SearchCapExceeded::Kind::WallClock,
                            "wall-clock cap exceeded during unbounded search");
  if (depth > st->opts.max_depth)
    throw SearchCapExceeded(
        SearchCapExceeded::Kind::Depth,
        "search depth cap exceeded (" + std::to_string(st->opts.max_depth) +
            ")");
}

SolutionStream solve_goal(EngineState* st, Program p, GoalPtr g, Substitution s,
                          std::uint64_t depth);

// Backchaining phase: prove atom `a` from the distinguished clause `d`.
inline SolutionStream backchain_clause(EngineState* st, Program p, ClausePtr d,
                                       TermPtr a, Substitution s,
                                       std::uint64_t depth) {
  check_caps(st, depth);
  switch (d->kind) {
    case Clause::Kind::Fact: {
      if (auto s2 = unify(d->atom, a, s, st->opts.occurs_check)) {
        Answer one{std::move(*s2), 1};
        co_yield one;
      }
      co_return;
    }
    case Clause::Kind::Rule: {
      auto s2 = unify(d->atom, a, s, st->opts.occurs_check);
      if (!s2) co_return;
      auto sub = solve_goal(st, p, d->body, std::move(*s2), depth + 1);
      while (sub.next()) {
        Answer x = sub.take();
        x.steps += 1;
        co_yield x;
      }
      co_return;
    }
    case Clause::Kind::Forall: {
      TermPtr fresh_var = Term::var(st->fresh.mint());
      ClausePtr body = substitute_clause_var(d->left, d->name, fresh_var);
      auto sub = backchain_clause(st, std::move(p), std::move(body),
                                  std::move(a), std::move(s), depth + 1);
      while (sub.next()) {
        Answer x = sub.take();
        x.steps += 1;
        co_yield x;
      }
      co_return;
    }
    case Clause::Kind::Conj: {
      {
        auto sub = backchain_clause(st, p, d->left, a, s, depth + 1);
        while (sub.next()) {
          Answer x = sub.take();
          x.steps += 1;
          co_yield x;
        }
      }
      auto sub = backchain_clause(st, std::move(p), d->right, std::move(a),
                                  std::move(s), depth + 1);
      while (sub.next()) {
        Answer x = sub.take();
        x.steps += 1;
        co_yield x;
      }
      co_return;
    }
    case Clause::Kind::MacroRef: {
      MacroDef def = lookup_macro(p.macros, d->name, MacroBodyKind::Clauses);
      auto sub = backchain_clause(st, std::move(p), def.clauses, std::move(a),
                                  std::move(s), depth + 1);
      while (sub.next()) {
        Answer x = sub.take();
        x.steps += 1;
        co_yield x;
      }
      co_return;
    }
  }
}

// Goal-reduction phase.
inline SolutionStream solve_goal(EngineState* st, Program p, GoalPtr g,
                                 Substitution s, std::uint64_t depth) {
  check_caps(st, depth);
  switch (g->kind) {
    case Goal::Kind::Atom: {
      const TermPtr& a = g->atom;
      std::size_t arity =
          a->kind == Term::Kind::Compound ? a->args.size() : 0;
      if (st->opts.builtins->contains(a->name, arity)) {
        if (auto s2 =
                st->opts.builtins->eval(a->name, a->args, s,
                                        st->opts.occurs_check)) {
          Answer one{std::move(*s2), 1};
          co_yield one;
        }
        co_return;
      }
      for (const ClausePtr& d : p.clauses) {
        auto sub = backchain_clause(st, p, d, a, s, depth + 1);
        while (sub.next()) {
          Answer x = sub.take();
          x.steps += 1;
          co_yield x;
        }
      }
      co_return;
    }
    case Goal::Kind::MacroRef: {
      MacroDef def = lookup_macro(p.macros, g->name, MacroBodyKind::Goal);
      auto sub = solve_goal(st, std::move(p), def.goal, std::move(s), depth + 1);
      while (sub.next()) {
        Answer x = sub.take();
        x.steps += 1;
        co_yield x;
      }
      co_return;
    }
    case Goal::Kind::Conj: {
      auto lhs = solve_goal(st, p, g->left, s, depth + 1);
      while (lhs.next()) {
        Answer a1 = lhs.take();
        auto rhs = solve_goal(st, p, g->body, a1.subst, depth + 1);
        while (rhs.next()) {
          Answer a2 = rhs.take();
          a2.steps += a1.steps + 1;
          co_yield a2;
        }
      }
      co_return;
    }
    case Goal::Kind::ClauseImpl: {
      auto sub = solve_goal(st, p.with_clause(g->clause), g->body, std::move(s),
                            depth + 1);
      while (sub.next()) {
        Answer x = sub.take();
        x.steps += 1;
        co_yield x;
      }
      co_return;
    }
    case Goal::Kind::LinkImpl: {
      auto sub = solve_goal(st, p.with_page(g->name, g->defs), g->body,
                            std::move(s), depth + 1);
      while (sub.next()) {
        Answer x = sub.take();
        x.steps += 1;
        co_yield x;
      }
      co_return;
    }
    case Goal::Kind::Link: {
      if (!st->opts.link_resolver) throw UnresolvedLink(g->origin);
      GoalPtr resolved = st->opts.link_resolver(g->origin, g->body);
      // Resolution itself is free; the resolved page implication pays its own
      // step when it is reduced.
      auto sub =
          solve_goal(st, std::move(p), std::move(resolved), std::move(s), depth);
      while (sub.next()) {
        Answer x = sub.take();
        co_yield x;
      }
      co_return;
    }
    case Goal::Kind::Exists: {
      TermPtr fresh_var = Term::var(st->fresh.mint());
      GoalPtr body = substitute_goal_var(g->body, g->name, fresh_var);
      auto sub =
          solve_goal(st, std::move(p), std::move(body), std::move(s), depth + 1);
      while (sub.next()) {
        Answer x = sub.take();
        x.steps += 1;
        co_yield x;
      }
      co_return;
    }
  }
}

// Owns the engine state for the lifetime of the stream.
inline SolutionStream solve_owned(std::shared_ptr<EngineState> st, Program p,
                                  GoalPtr g) {
  auto sub = solve_goal(st.get(), std::move(p), std::move(g), Substitution{}, 0);
  while (sub.next()) {
    Answer x = sub.take();
    co_yield x;
  }
}

}  // namespace detail_core

// Unbounded depth-first search: clauses in program order, conjuncts left to
// right, macro definitions front to back. Lazily enumerates every solution;
// may diverge unless the options install a deadline/depth cap.
inline SolutionStream solve(Program p, GoalPtr g, SolveOptions opts = {}) {
  auto st = std::make_shared<detail_core::EngineState>();
  st->opts = std::move(opts);
  return detail_core::solve_owned(std::move(st), std::move(p), std::move(g));
}

// Test/inspection entry: backchaining on one distinguished clause.
inline SolutionStream backchain(Program p, ClausePtr d, TermPtr atom,
                                Substitution s, SolveOptions opts = {}) {
  struct Holder {
    static SolutionStream run(std::shared_ptr<detail_core::EngineState> st,
                              Program p, ClausePtr d, TermPtr atom,
                              Substitution s) {
      auto sub = detail_core::backchain_clause(st.get(), std::move(p),
                                               std::move(d), std::move(atom),
                                               std::move(s), 0);
      while (sub.next()) {
        Answer x = sub.take();
        co_yield x;
      }
    }
  };
  auto st = std::make_shared<detail_core::EngineState>();
  st->opts = std::move(opts);
  return Holder::run(std::move(st), std::move(p), std::move(d), std::move(atom),
                     std::move(s));
}

}  // namespace hornlink

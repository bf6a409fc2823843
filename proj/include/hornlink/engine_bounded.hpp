#pragma once

#include <cassert>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hornlink/ast.hpp"
#include "hornlink/builtins.hpp"
#include "hornlink/engine_core.hpp"  // LinkResolver, lookup_macro
#include "hornlink/errors.hpp"
#include "hornlink/generator.hpp"
#include "hornlink/printer.hpp"
#include "hornlink/unify.hpp"

namespace hornlink {

// Length-bounded proof search. Every inference-rule application consumes one
// step of the allowance `m`; a branch reached with no allowance left is cut.
// A successful derivation reports its exact length n (n <= m always).

struct BoundedSolution {
  Substitution subst;
  std::uint64_t length = 0;
};

// Rule identifiers appearing in traces. Stable numeric protocol, see README.
enum RuleId : int {
  kRuleLeaf = 2,           // fact head matches the atom / builtin succeeds
  kRuleBackchainRule = 3,  // rule head matches, body becomes the goal
  kRuleInstantiate = 4,    // strip one universal binder
  kRuleClauseConjL = 5,    // backchain into left conjunct of a clause group
  kRuleClauseConjR = 6,    // backchain into right conjunct
  kRuleClauseMacro = 7,    // clause macro reference expands
  kRuleDecide = 8,         // commit to one program clause for an atom
  kRuleGoalConj = 9,       // split a conjunctive goal
  kRuleExists = 10,        // instantiate an existential goal
  kRuleClauseImpl = 11,    // clause implication extends the program
  kRulePageImpl = 12,      // page implication loads page definitions
  kRuleGoalMacro = 13,     // goal macro reference expands
};

struct TraceEvent {
  int rule = 0;
  std::uint32_t depth = 0;
  std::string goal;              // rendered snapshot of what is being proved
  std::uint64_t budget = 0;      // allowance before the rule applied
  std::uint64_t subtree_length = 0;  // steps of the subderivation it roots
};

enum class OutcomeKind { Success, Failure, BoundExhausted };

struct SolveOutcome {
  OutcomeKind kind = OutcomeKind::Failure;
  Substitution answer;
  std::uint64_t length = 0;
  std::vector<TraceEvent> trace;  // successful derivation, when recorded
};

struct BoundedOptions {
  bool occurs_check = true;
  bool record_trace = false;
  LinkResolver link_resolver;
  const BuiltinTable* builtins = &BuiltinTable::standard();
};

namespace detail_bounded {

struct SearchState {
  BoundedOptions opts;
  FreshSource fresh;
  bool cut = false;            // some branch ran out of allowance
  std::vector<TraceEvent> trace;

  std::size_t mark() const { return trace.size(); }
  void drop_to(std::size_t mark) {
    if (opts.record_trace) trace.resize(mark);
  }
  void push(int rule, std::uint32_t depth, std::uint64_t budget,
            const std::string& goal) {
    trace.push_back(TraceEvent{rule, depth, goal, budget, 0});
  }
  bool recording() const { return opts.record_trace; }
};

Generator<BoundedSolution> prove_goal(SearchState* st, Program p, GoalPtr g,
                                      Substitution s, std::uint64_t m,
                                      std::uint32_t depth);

inline Generator<BoundedSolution> prove_backchain(SearchState* st, Program p,
                                                  ClausePtr d, TermPtr a,
                                                  Substitution s,
                                                  std::uint64_t m,
                                                  std::uint32_t depth) {
  if (m == 0) {
    st->cut = true;
    co_return;
  }
  switch (d->kind) {
    case Clause::Kind::Fact: {
      if (auto s2 = unify(d->atom, a, s, st->opts.occurs_check)) {
        std::size_t mk = st->mark();
        if (st->recording()) st->push(kRuleLeaf, depth, m, render_term(a));
        BoundedSolution one{std::move(*s2), 1};
        co_yield one;
        st->drop_to(mk);
      }
      co_return;
    }
    case Clause::Kind::Rule: {
      auto s2 = unify(d->atom, a, s, st->opts.occurs_check);
      if (!s2) co_return;
      std::size_t mk = st->mark();
      if (st->recording())
        st->push(kRuleBackchainRule, depth, m, render_term(a));
      auto sub = prove_goal(st, p, d->body, std::move(*s2), m - 1, depth + 1);
      while (sub.next()) {
        BoundedSolution x = sub.take();
        x.length += 1;
        co_yield x;
      }
      st->drop_to(mk);
      co_return;
    }
    case Clause::Kind::Forall: {
      std::size_t mk = st->mark();
      if (st->recording())
        st->push(kRuleInstantiate, depth, m, render_term(a));
      TermPtr fresh_var = Term::var(st->fresh.mint());
      ClausePtr body = substitute_clause_var(d->left, d->name, fresh_var);
      auto sub = prove_backchain(st, std::move(p), std::move(body), std::move(a),
                                 std::move(s), m - 1, depth + 1);
      while (sub.next()) {
        BoundedSolution x = sub.take();
        x.length += 1;
        co_yield x;
      }
      st->drop_to(mk);
      co_return;
    }
    case Clause::Kind::Conj: {
      {
        std::size_t mk = st->mark();
        if (st->recording())
          st->push(kRuleClauseConjL, depth, m, render_term(a));
        auto sub = prove_backchain(st, p, d->left, a, s, m - 1, depth + 1);
        while (sub.next()) {
          BoundedSolution x = sub.take();
          x.length += 1;
          co_yield x;
        }
        st->drop_to(mk);
      }
      std::size_t mk = st->mark();
      if (st->recording())
        st->push(kRuleClauseConjR, depth, m, render_term(a));
      auto sub = prove_backchain(st, std::move(p), d->right, std::move(a),
                                 std::move(s), m - 1, depth + 1);
      while (sub.next()) {
        BoundedSolution x = sub.take();
        x.length += 1;
        co_yield x;
      }
      st->drop_to(mk);
      co_return;
    }
    case Clause::Kind::MacroRef: {
      MacroDef def = lookup_macro(p.macros, d->name, MacroBodyKind::Clauses);
      std::size_t mk = st->mark();
      if (st->recording())
        st->push(kRuleClauseMacro, depth, m, render_term(a));
      auto sub = prove_backchain(st, std::move(p), def.clauses, std::move(a),
                                 std::move(s), m - 1, depth + 1);
      while (sub.next()) {
        BoundedSolution x = sub.take();
        x.length += 1;
        co_yield x;
      }
      st->drop_to(mk);
      co_return;
    }
  }
}

inline Generator<BoundedSolution> prove_goal(SearchState* st, Program p,
                                             GoalPtr g, Substitution s,
                                             std::uint64_t m,
                                             std::uint32_t depth) {
  if (m == 0) {
    st->cut = true;
    co_return;
  }
  switch (g->kind) {
    case Goal::Kind::Atom: {
      const TermPtr& a = g->atom;
      std::size_t arity = a->kind == Term::Kind::Compound ? a->args.size() : 0;
      if (st->opts.builtins->contains(a->name, arity)) {
        if (auto s2 = st->opts.builtins->eval(a->name, a->args, s,
                                              st->opts.occurs_check)) {
          std::size_t mk = st->mark();
          if (st->recording()) st->push(kRuleLeaf, depth, m, render_term(a));
          BoundedSolution one{std::move(*s2), 1};
          co_yield one;
          st->drop_to(mk);
        }
        co_return;
      }
      for (const ClausePtr& d : p.clauses) {
        std::size_t mk = st->mark();
        if (st->recording()) st->push(kRuleDecide, depth, m, render_term(a));
        auto sub = prove_backchain(st, p, d, a, s, m - 1, depth + 1);
        while (sub.next()) {
          BoundedSolution x = sub.take();
          x.length += 1;
          co_yield x;
        }
        st->drop_to(mk);
      }
      co_return;
    }
    case Goal::Kind::MacroRef: {
      MacroDef def = lookup_macro(p.macros, g->name, MacroBodyKind::Goal);
      std::size_t mk = st->mark();
      if (st->recording()) st->push(kRuleGoalMacro, depth, m, "/" + g->name);
      auto sub =
          prove_goal(st, std::move(p), def.goal, std::move(s), m - 1, depth + 1);
      while (sub.next()) {
        BoundedSolution x = sub.take();
        x.length += 1;
        co_yield x;
      }
      st->drop_to(mk);
      co_return;
    }
    case Goal::Kind::Conj: {
      std::size_t mk = st->mark();
      if (st->recording()) st->push(kRuleGoalConj, depth, m, render_goal(g));
      auto lhs = prove_goal(st, p, g->left, s, m - 1, depth + 1);
      while (lhs.next()) {
        BoundedSolution a1 = lhs.take();
        // The right conjunct gets whatever the left one did not spend.
        auto rhs =
            prove_goal(st, p, g->body, a1.subst, m - 1 - a1.length, depth + 1);
        while (rhs.next()) {
          BoundedSolution a2 = rhs.take();
          a2.length += a1.length + 1;
          co_yield a2;
        }
      }
      st->drop_to(mk);
      co_return;
    }
    case Goal::Kind::ClauseImpl: {
      std::size_t mk = st->mark();
      if (st->recording()) st->push(kRuleClauseImpl, depth, m, render_goal(g));
      auto sub = prove_goal(st, p.with_clause(g->clause), g->body, std::move(s),
                            m - 1, depth + 1);
      while (sub.next()) {
        BoundedSolution x = sub.take();
        x.length += 1;
        co_yield x;
      }
      st->drop_to(mk);
      co_return;
    }
    case Goal::Kind::LinkImpl: {
      std::size_t mk = st->mark();
      if (st->recording()) st->push(kRulePageImpl, depth, m, render_goal(g));
      auto sub = prove_goal(st, p.with_page(g->name, g->defs), g->body,
                            std::move(s), m - 1, depth + 1);
      while (sub.next()) {
        BoundedSolution x = sub.take();
        x.length += 1;
        co_yield x;
      }
      st->drop_to(mk);
      co_return;
    }
    case Goal::Kind::Link: {
      if (!st->opts.link_resolver) throw UnresolvedLink(g->origin);
      GoalPtr resolved = st->opts.link_resolver(g->origin, g->body);
      // Resolution is free; the page implication pays when reduced.
      auto sub = prove_goal(st, std::move(p), std::move(resolved), std::move(s),
                            m, depth);
      while (sub.next()) {
        BoundedSolution x = sub.take();
        co_yield x;
      }
      co_return;
    }
    case Goal::Kind::Exists: {
      std::size_t mk = st->mark();
      if (st->recording()) st->push(kRuleExists, depth, m, render_goal(g));
      TermPtr fresh_var = Term::var(st->fresh.mint());
      GoalPtr body = substitute_goal_var(g->body, g->name, fresh_var);
      auto sub = prove_goal(st, std::move(p), std::move(body), std::move(s),
                            m - 1, depth + 1);
      while (sub.next()) {
        BoundedSolution x = sub.take();
        x.length += 1;
        co_yield x;
      }
      st->drop_to(mk);
      co_return;
    }
  }
}

// Fills subtree_length: event i roots the consecutive run of deeper events
// that follows it, and a derivation step count is exactly that span size.
inline void finalize_trace(std::vector<TraceEvent>& trace) {
  for (std::size_t i = 0; i < trace.size(); ++i) {
    std::size_t j = i + 1;
    while (j < trace.size() && trace[j].depth > trace[i].depth) ++j;
    trace[i].subtree_length = j - i;
  }
}

}  // namespace detail_bounded

// A bounded search that can be pumped for further solutions. Holds the cut
// flag and, when tracing, a snapshot of the successful derivation.
class BoundedRun {
public:
  BoundedRun(Program p, GoalPtr g, std::uint64_t allowance,
             BoundedOptions opts = {})
      : state_(std::make_shared<detail_bounded::SearchState>()) {
    state_->opts = std::move(opts);
    stream_ = run(state_, std::move(p), std::move(g), allowance);
  }

  std::optional<BoundedSolution> next() {
    if (!stream_.next()) return std::nullopt;
    if (state_->recording()) {
      last_trace_ = state_->trace;
      detail_bounded::finalize_trace(last_trace_);
    }
    return stream_.take();
  }

  // True once any explored branch was cut short by the allowance.
  bool cut_observed() const { return state_->cut; }

  // Trace of the most recent solution (empty unless record_trace was set).
  const std::vector<TraceEvent>& last_trace() const { return last_trace_; }

private:
  static Generator<BoundedSolution> run(
      std::shared_ptr<detail_bounded::SearchState> st, Program p, GoalPtr g,
      std::uint64_t allowance) {
    auto sub = detail_bounded::prove_goal(st.get(), std::move(p), std::move(g),
                                          Substitution{}, allowance, 0);
    while (sub.next()) {
      BoundedSolution x = sub.take();
      co_yield x;
    }
  }

  std::shared_ptr<detail_bounded::SearchState> state_;
  Generator<BoundedSolution> stream_;
  std::vector<TraceEvent> last_trace_;
};

// First solution within the allowance, or how the search ended instead:
// Failure when every branch dead-ends with allowance to spare, BoundExhausted
// when at least one branch was cut and none succeeded.
inline SolveOutcome solve_bounded(Program p, GoalPtr g, std::uint64_t allowance,
                                  BoundedOptions opts = {}) {
  BoundedRun run(std::move(p), std::move(g), allowance, std::move(opts));
  if (auto sol = run.next()) {
    return SolveOutcome{OutcomeKind::Success, std::move(sol->subst),
                        sol->length, run.last_trace()};
  }
  return SolveOutcome{run.cut_observed() ? OutcomeKind::BoundExhausted
                                         : OutcomeKind::Failure,
                      Substitution{}, 0, {}};
}

// Smallest derivation length for g, up to cap; nullopt when unprovable or
// out of reach. Iterative deepening: the first allowance that succeeds is the
// minimum, and a cut-free failure proves unprovability at every allowance.
inline std::optional<std::uint64_t> min_proof_length(Program p, GoalPtr g,
                                                     std::uint64_t cap,
                                                     BoundedOptions opts = {}) {
  for (std::uint64_t m = 1; m <= cap; ++m) {
    SolveOutcome out = solve_bounded(p, g, m, opts);
    if (out.kind == OutcomeKind::Success) {
      assert(out.length == m);
      return out.length;
    }
    if (out.kind == OutcomeKind::Failure) return std::nullopt;
  }
  return std::nullopt;
}

// One `step=<i> rule=<id> m=<m> goal=<goal>` line per derivation step.
inline std::string format_trace(const std::vector<TraceEvent>& trace) {
  std::string out;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    out += "step=" + std::to_string(i + 1) +
           " rule=" + std::to_string(trace[i].rule) +
           " m=" + std::to_string(trace[i].budget) + " goal=" + trace[i].goal +
           "\n";
  }
  return out;
}

}  // namespace hornlink

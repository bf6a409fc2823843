#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "hornlink/plist.hpp"
#include "hornlink/term.hpp"

namespace hornlink {

struct Goal;
struct Clause;
using GoalPtr = std::shared_ptr<const Goal>;
using ClausePtr = std::shared_ptr<const Clause>;

// A macro name is bound either to a query fragment or to program clauses.
enum class MacroBodyKind { Goal, Clauses };

struct MacroDef {
  std::string name;  // without the leading '/'
  MacroBodyKind kind = MacroBodyKind::Goal;
  GoalPtr goal;       // kind == Goal
  ClausePtr clauses;  // kind == Clauses
};

// Program clause. Conj/Forall exist because implications can introduce whole
// groups at once; MacroRef defers to whatever definition is most recent when
// the clause is actually used.
struct Clause {
  enum class Kind { Fact, Rule, MacroRef, Forall, Conj };

  Kind kind;
  TermPtr atom;       // Fact; Rule head
  GoalPtr body;       // Rule body
  std::string name;   // MacroRef macro name; Forall bound variable
  ClausePtr left;     // Forall scope; Conj left
  ClausePtr right;    // Conj right
};

inline ClausePtr make_fact(TermPtr atom) {
  return std::make_shared<const Clause>(
      Clause{Clause::Kind::Fact, std::move(atom), nullptr, "", nullptr, nullptr});
}
inline ClausePtr make_rule(TermPtr head, GoalPtr body) {
  return std::make_shared<const Clause>(Clause{
      Clause::Kind::Rule, std::move(head), std::move(body), "", nullptr, nullptr});
}
inline ClausePtr make_clause_macro(std::string name) {
  return std::make_shared<const Clause>(Clause{
      Clause::Kind::MacroRef, nullptr, nullptr, std::move(name), nullptr, nullptr});
}
inline ClausePtr make_forall(std::string var, ClausePtr scope) {
  return std::make_shared<const Clause>(Clause{
      Clause::Kind::Forall, nullptr, nullptr, std::move(var), std::move(scope),
      nullptr});
}
inline ClausePtr make_clause_conj(ClausePtr left, ClausePtr right) {
  return std::make_shared<const Clause>(Clause{
      Clause::Kind::Conj, nullptr, nullptr, "", std::move(left), std::move(right)});
}

// Goal formula. Link is a page implication whose page has not been fetched
// yet; LinkImpl carries the fetched definitions. The engine only consumes
// LinkImpl (or asks its resolver hook to turn Link into one).
struct Goal {
  enum class Kind { Atom, MacroRef, Conj, ClauseImpl, LinkImpl, Link, Exists };

  Kind kind;
  TermPtr atom;                // Atom
  std::string name;            // MacroRef macro name; Exists variable; LinkImpl root
  std::string origin;          // Link target as written; LinkImpl provenance
  ClausePtr clause;            // ClauseImpl antecedent
  std::vector<MacroDef> defs;  // LinkImpl page definitions, file order
  GoalPtr left;                // Conj left
  GoalPtr body;                // Conj right; ClauseImpl/LinkImpl/Link/Exists scope
};

inline GoalPtr make_atom(TermPtr t) {
  return std::make_shared<const Goal>(
      Goal{Goal::Kind::Atom, std::move(t), "", "", nullptr, {}, nullptr, nullptr});
}
inline GoalPtr make_goal_macro(std::string name) {
  return std::make_shared<const Goal>(Goal{
      Goal::Kind::MacroRef, nullptr, std::move(name), "", nullptr, {}, nullptr,
      nullptr});
}
inline GoalPtr make_conj(GoalPtr left, GoalPtr right) {
  return std::make_shared<const Goal>(Goal{
      Goal::Kind::Conj, nullptr, "", "", nullptr, {}, std::move(left),
      std::move(right)});
}
inline GoalPtr make_clause_impl(ClausePtr antecedent, GoalPtr body) {
  return std::make_shared<const Goal>(Goal{
      Goal::Kind::ClauseImpl, nullptr, "", "", std::move(antecedent), {}, nullptr,
      std::move(body)});
}
inline GoalPtr make_link(std::string origin, GoalPtr body) {
  return std::make_shared<const Goal>(Goal{
      Goal::Kind::Link, nullptr, "", std::move(origin), nullptr, {}, nullptr,
      std::move(body)});
}
inline GoalPtr make_link_impl(std::string root, std::vector<MacroDef> defs,
                              GoalPtr body, std::string origin) {
  return std::make_shared<const Goal>(Goal{
      Goal::Kind::LinkImpl, nullptr, std::move(root), std::move(origin), nullptr,
      std::move(defs), nullptr, std::move(body)});
}
inline GoalPtr make_exists(std::string var, GoalPtr body) {
  return std::make_shared<const Goal>(Goal{
      Goal::Kind::Exists, nullptr, std::move(var), "", nullptr, {}, nullptr,
      std::move(body)});
}

// The program: clauses tried front first, macro definitions with the most
// recent at the front. Both persistent, so extension is O(1) and scope exit
// is free.
struct Program {
  PList<ClausePtr> clauses;
  PList<MacroDef> macros;

  Program with_clause(ClausePtr c) const {
    return Program{clauses.push_front(std::move(c)), macros};
  }
  Program with_macro(MacroDef def) const {
    return Program{clauses, macros.push_front(std::move(def))};
  }
  // Page scope: the root enters the clause list, the definitions enter the
  // macro list with defs[0] ending up front-most.
  Program with_page(const std::string& root,
                    const std::vector<MacroDef>& defs) const {
    PList<MacroDef> m = macros;
    for (auto it = defs.rbegin(); it != defs.rend(); ++it) m = m.push_front(*it);
    return Program{clauses.push_front(make_clause_macro(root)), m};
  }

  static Program of(std::vector<ClausePtr> cs, std::vector<MacroDef> ms = {}) {
    return Program{PList<ClausePtr>::from(std::move(cs)),
                   PList<MacroDef>::from(std::move(ms))};
  }
};

struct Query {
  std::optional<std::uint64_t> bound;
  GoalPtr goal;
};

// ---- structural equality ----

bool goal_equal(const GoalPtr& a, const GoalPtr& b);

inline bool clause_equal(const ClausePtr& a, const ClausePtr& b) {
  if (a == b) return true;
  if (!a || !b || a->kind != b->kind) return false;
  switch (a->kind) {
    case Clause::Kind::Fact:
      return term_equal(a->atom, b->atom);
    case Clause::Kind::Rule:
      return term_equal(a->atom, b->atom) && goal_equal(a->body, b->body);
    case Clause::Kind::MacroRef:
      return a->name == b->name;
    case Clause::Kind::Forall:
      return a->name == b->name && clause_equal(a->left, b->left);
    case Clause::Kind::Conj:
      return clause_equal(a->left, b->left) && clause_equal(a->right, b->right);
  }
  return false;
}

inline bool macro_def_equal(const MacroDef& a, const MacroDef& b) {
  if (a.name != b.name || a.kind != b.kind) return false;
  return a.kind == MacroBodyKind::Goal ? goal_equal(a.goal, b.goal)
                                       : clause_equal(a.clauses, b.clauses);
}

inline bool goal_equal(const GoalPtr& a, const GoalPtr& b) {
  if (a == b) return true;
  if (!a || !b || a->kind != b->kind) return false;
  switch (a->kind) {
    case Goal::Kind::Atom:
      return term_equal(a->atom, b->atom);
    case Goal::Kind::MacroRef:
      return a->name == b->name;
    case Goal::Kind::Conj:
      return goal_equal(a->left, b->left) && goal_equal(a->body, b->body);
    case Goal::Kind::ClauseImpl:
      return clause_equal(a->clause, b->clause) && goal_equal(a->body, b->body);
    case Goal::Kind::Link:
      return a->origin == b->origin && goal_equal(a->body, b->body);
    case Goal::Kind::LinkImpl: {
      if (a->name != b->name || a->origin != b->origin ||
          a->defs.size() != b->defs.size())
        return false;
      for (std::size_t i = 0; i < a->defs.size(); ++i)
        if (!macro_def_equal(a->defs[i], b->defs[i])) return false;
      return goal_equal(a->body, b->body);
    }
    case Goal::Kind::Exists:
      return a->name == b->name && goal_equal(a->body, b->body);
  }
  return false;
}

// ---- free variables (binder-aware, first-occurrence order) ----

void collect_goal_vars(const GoalPtr& g, std::set<std::string> shadow,
                       std::vector<std::string>& order,
                       std::set<std::string>& seen);

inline void collect_clause_vars(const ClausePtr& c, std::set<std::string> shadow,
                                std::vector<std::string>& order,
                                std::set<std::string>& seen) {
  switch (c->kind) {
    case Clause::Kind::Fact:
      collect_term_vars(c->atom, shadow, order, seen);
      return;
    case Clause::Kind::Rule:
      collect_term_vars(c->atom, shadow, order, seen);
      collect_goal_vars(c->body, shadow, order, seen);
      return;
    case Clause::Kind::MacroRef:
      return;
    case Clause::Kind::Forall:
      shadow.insert(c->name);
      collect_clause_vars(c->left, std::move(shadow), order, seen);
      return;
    case Clause::Kind::Conj:
      collect_clause_vars(c->left, shadow, order, seen);
      collect_clause_vars(c->right, std::move(shadow), order, seen);
      return;
  }
}

inline void collect_goal_vars(const GoalPtr& g, std::set<std::string> shadow,
                              std::vector<std::string>& order,
                              std::set<std::string>& seen) {
  switch (g->kind) {
    case Goal::Kind::Atom:
      collect_term_vars(g->atom, shadow, order, seen);
      return;
    case Goal::Kind::MacroRef:
      return;
    case Goal::Kind::Conj:
      collect_goal_vars(g->left, shadow, order, seen);
      collect_goal_vars(g->body, std::move(shadow), order, seen);
      return;
    case Goal::Kind::ClauseImpl:
      collect_clause_vars(g->clause, shadow, order, seen);
      collect_goal_vars(g->body, std::move(shadow), order, seen);
      return;
    case Goal::Kind::Link:
    case Goal::Kind::LinkImpl:
      // Page definitions are closed (their statements were binder-wrapped at
      // parse time), so only the scope contributes.
      collect_goal_vars(g->body, std::move(shadow), order, seen);
      return;
    case Goal::Kind::Exists:
      shadow.insert(g->name);
      collect_goal_vars(g->body, std::move(shadow), order, seen);
      return;
  }
}

inline std::vector<std::string> free_goal_vars(const GoalPtr& g) {
  std::vector<std::string> order;
  std::set<std::string> seen;
  collect_goal_vars(g, {}, order, seen);
  return order;
}

inline std::vector<std::string> free_clause_vars(const ClausePtr& c) {
  std::vector<std::string> order;
  std::set<std::string> seen;
  collect_clause_vars(c, {}, order, seen);
  return order;
}

// Wraps every free variable of a top-level clause statement in a universal
// binder, first occurrence outermost.
inline ClausePtr close_clause(ClausePtr c) {
  auto vars = free_clause_vars(c);
  for (auto it = vars.rbegin(); it != vars.rend(); ++it)
    c = make_forall(*it, std::move(c));
  return c;
}

// ---- goal/clause overlap conversions ----
//
// Atoms, macro references and conjunctions read equally well as goals or as
// clause groups. Macro lookup uses these to serve a definition in whichever
// role the call site demands; anything outside the overlap yields nullptr.

inline std::optional<GoalPtr> clause_as_goal(const ClausePtr& c) {
  switch (c->kind) {
    case Clause::Kind::Fact:
      return make_atom(c->atom);
    case Clause::Kind::MacroRef:
      return make_goal_macro(c->name);
    case Clause::Kind::Conj: {
      auto l = clause_as_goal(c->left);
      auto r = clause_as_goal(c->right);
      if (!l || !r) return std::nullopt;
      return make_conj(*l, *r);
    }
    default:
      return std::nullopt;
  }
}

inline std::optional<ClausePtr> goal_as_clause(const GoalPtr& g) {
  switch (g->kind) {
    case Goal::Kind::Atom:
      return make_fact(g->atom);
    case Goal::Kind::MacroRef:
      return make_clause_macro(g->name);
    case Goal::Kind::Conj: {
      auto l = goal_as_clause(g->left);
      auto r = goal_as_clause(g->body);
      if (!l || !r) return std::nullopt;
      return make_clause_conj(*l, *r);
    }
    default:
      return std::nullopt;
  }
}

}  // namespace hornlink

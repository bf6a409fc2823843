#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "hornlink/ast.hpp"
#include "hornlink/errors.hpp"
#include "hornlink/plist.hpp"
#include "hornlink/term.hpp"

namespace hornlink {

// Mints variable names that cannot clash with anything parsed: '#' never
// survives the lexer inside an identifier.
class FreshSource {
public:
  std::string mint() { return "#" + std::to_string(++counter_); }

private:
  std::uint64_t counter_ = 0;
};

// Triangular substitution over a persistent binding list. Bindings may map a
// variable to a term containing further bound variables; resolve() chases
// them out. Extension never rewrites existing bindings, so sharing a tail
// with an older substitution is safe.
class Substitution {
public:
  using Binding = std::pair<std::string, TermPtr>;

  Substitution() = default;

  std::optional<TermPtr> lookup(const std::string& var) const {
    for (const auto& [name, value] : bindings_)
      if (name == var) return value;
    return std::nullopt;
  }

  bool has(const std::string& var) const { return lookup(var).has_value(); }

  // Chases variable-to-variable links at the root only.
  TermPtr walk(TermPtr t) const {
    while (t->kind == Term::Kind::Variable) {
      auto next = lookup(t->name);
      if (!next) return t;
      t = *next;
    }
    return t;
  }

  // Deep application. Throws CyclicTerm on a cyclic binding chain, which can
  // only exist if unification ran with the occurs check off.
  TermPtr resolve(const TermPtr& t) const {
    std::set<std::string> active;
    return resolve_impl(t, active, nullptr);
  }

  // Same, but treats names in `shadow` as unbound (binder shielding).
  TermPtr resolve_shadowed(const TermPtr& t,
                           const std::set<std::string>& shadow) const {
    std::set<std::string> active;
    return resolve_impl(t, active, &shadow);
  }

  // `var` must be unbound; the caller is expected to have walked it.
  Substitution bind(std::string var, TermPtr value) const {
    Substitution out = *this;
    out.bindings_ =
        bindings_.push_front(Binding{std::move(var), std::move(value)});
    return out;
  }

  std::size_t size() const { return bindings_.size(); }
  const PList<Binding>& bindings() const { return bindings_; }

private:
  TermPtr resolve_impl(TermPtr t, std::set<std::string>& active,
                       const std::set<std::string>* shadow) const {
    std::vector<std::string> chain;
    while (t->kind == Term::Kind::Variable &&
           (!shadow || !shadow->count(t->name))) {
      if (active.count(t->name)) throw CyclicTerm(t->name);
      auto next = lookup(t->name);
      if (!next) break;
      chain.push_back(t->name);
      t = *next;
    }
    if (t->kind != Term::Kind::Compound) return t;
    for (const auto& v : chain) active.insert(v);
    std::vector<TermPtr> args;
    args.reserve(t->args.size());
    bool changed = false;
    for (const auto& a : t->args) {
      args.push_back(resolve_impl(a, active, shadow));
      changed = changed || args.back() != a;
    }
    for (const auto& v : chain) active.erase(v);
    if (!changed) return t;
    return Term::compound(t->name, std::move(args));
  }

  PList<Binding> bindings_;
};

// ---- unification ----

inline bool occurs_in(const std::string& var, TermPtr t,
                      const Substitution& s) {
  t = s.walk(std::move(t));
  if (t->kind == Term::Kind::Variable) return t->name == var;
  for (const auto& a : t->args)
    if (occurs_in(var, a, s)) return true;
  return false;
}

// Most general unifier extending `s`, or nullopt. Purely functional: failure
// leaves the caller's substitution untouched.
inline std::optional<Substitution> unify(const TermPtr& a, const TermPtr& b,
                                         const Substitution& s,
                                         bool occurs_check = true) {
  TermPtr x = s.walk(a);
  TermPtr y = s.walk(b);
  if (x->kind == Term::Kind::Variable) {
    if (y->kind == Term::Kind::Variable && x->name == y->name) return s;
    if (occurs_check && occurs_in(x->name, y, s)) return std::nullopt;
    return s.bind(x->name, y);
  }
  if (y->kind == Term::Kind::Variable) {
    if (occurs_check && occurs_in(y->name, x, s)) return std::nullopt;
    return s.bind(y->name, x);
  }
  if (x->kind == Term::Kind::Constant || y->kind == Term::Kind::Constant)
    return (x->kind == y->kind && x->name == y->name)
               ? std::optional<Substitution>(s)
               : std::nullopt;
  if (x->name != y->name || x->args.size() != y->args.size())
    return std::nullopt;
  Substitution cur = s;
  for (std::size_t i = 0; i < x->args.size(); ++i) {
    auto next = unify(x->args[i], y->args[i], cur, occurs_check);
    if (!next) return std::nullopt;
    cur = std::move(*next);
  }
  return cur;
}

// ---- application to formulas (binder-aware) ----

inline TermPtr apply(const Substitution& s, const TermPtr& t) {
  return s.resolve(t);
}

GoalPtr apply_shadowed(const Substitution& s, const GoalPtr& g,
                       std::set<std::string> shadow);

inline ClausePtr apply_shadowed(const Substitution& s, const ClausePtr& c,
                                std::set<std::string> shadow) {
  switch (c->kind) {
    case Clause::Kind::Fact:
      return make_fact(s.resolve_shadowed(c->atom, shadow));
    case Clause::Kind::Rule: {
      auto head = s.resolve_shadowed(c->atom, shadow);
      return make_rule(std::move(head),
                       apply_shadowed(s, c->body, std::move(shadow)));
    }
    case Clause::Kind::MacroRef:
      return c;
    case Clause::Kind::Forall: {
      shadow.insert(c->name);
      return make_forall(c->name, apply_shadowed(s, c->left, std::move(shadow)));
    }
    case Clause::Kind::Conj:
      return make_clause_conj(apply_shadowed(s, c->left, shadow),
                              apply_shadowed(s, c->right, std::move(shadow)));
  }
  return c;
}

inline GoalPtr apply_shadowed(const Substitution& s, const GoalPtr& g,
                              std::set<std::string> shadow) {
  switch (g->kind) {
    case Goal::Kind::Atom:
      return make_atom(s.resolve_shadowed(g->atom, shadow));
    case Goal::Kind::MacroRef:
      return g;
    case Goal::Kind::Conj:
      return make_conj(apply_shadowed(s, g->left, shadow),
                       apply_shadowed(s, g->body, std::move(shadow)));
    case Goal::Kind::ClauseImpl:
      return make_clause_impl(apply_shadowed(s, g->clause, shadow),
                              apply_shadowed(s, g->body, std::move(shadow)));
    case Goal::Kind::Link:
      return make_link(g->origin, apply_shadowed(s, g->body, std::move(shadow)));
    case Goal::Kind::LinkImpl:
      // Page definitions are closed; only the scope sees bindings.
      return make_link_impl(g->name, g->defs,
                            apply_shadowed(s, g->body, std::move(shadow)),
                            g->origin);
    case Goal::Kind::Exists: {
      shadow.insert(g->name);
      return make_exists(g->name, apply_shadowed(s, g->body, std::move(shadow)));
    }
  }
  return g;
}

inline GoalPtr apply(const Substitution& s, const GoalPtr& g) {
  return apply_shadowed(s, g, {});
}
inline ClausePtr apply(const Substitution& s, const ClausePtr& c) {
  return apply_shadowed(s, c, {});
}

// ---- single-variable structural substitution (binder instantiation) ----

GoalPtr substitute_goal_var(const GoalPtr& g, const std::string& var,
                            const TermPtr& replacement);

inline TermPtr substitute_term_var(const TermPtr& t, const std::string& var,
                                   const TermPtr& replacement) {
  if (t->kind == Term::Kind::Variable)
    return t->name == var ? replacement : t;
  if (t->kind == Term::Kind::Constant) return t;
  std::vector<TermPtr> args;
  args.reserve(t->args.size());
  bool changed = false;
  for (const auto& a : t->args) {
    args.push_back(substitute_term_var(a, var, replacement));
    changed = changed || args.back() != a;
  }
  return changed ? Term::compound(t->name, std::move(args)) : t;
}

inline ClausePtr substitute_clause_var(const ClausePtr& c,
                                       const std::string& var,
                                       const TermPtr& replacement) {
  switch (c->kind) {
    case Clause::Kind::Fact:
      return make_fact(substitute_term_var(c->atom, var, replacement));
    case Clause::Kind::Rule:
      return make_rule(substitute_term_var(c->atom, var, replacement),
                       substitute_goal_var(c->body, var, replacement));
    case Clause::Kind::MacroRef:
      return c;
    case Clause::Kind::Forall:
      if (c->name == var) return c;  // inner binder shadows
      return make_forall(c->name,
                         substitute_clause_var(c->left, var, replacement));
    case Clause::Kind::Conj:
      return make_clause_conj(substitute_clause_var(c->left, var, replacement),
                              substitute_clause_var(c->right, var, replacement));
  }
  return c;
}

inline GoalPtr substitute_goal_var(const GoalPtr& g, const std::string& var,
                                   const TermPtr& replacement) {
  switch (g->kind) {
    case Goal::Kind::Atom:
      return make_atom(substitute_term_var(g->atom, var, replacement));
    case Goal::Kind::MacroRef:
      return g;
    case Goal::Kind::Conj:
      return make_conj(substitute_goal_var(g->left, var, replacement),
                       substitute_goal_var(g->body, var, replacement));
    case Goal::Kind::ClauseImpl:
      return make_clause_impl(substitute_clause_var(g->clause, var, replacement),
                              substitute_goal_var(g->body, var, replacement));
    case Goal::Kind::Link:
      return make_link(g->origin, substitute_goal_var(g->body, var, replacement));
    case Goal::Kind::LinkImpl:
      return make_link_impl(g->name, g->defs,
                            substitute_goal_var(g->body, var, replacement),
                            g->origin);
    case Goal::Kind::Exists:
      if (g->name == var) return g;
      return make_exists(g->name, substitute_goal_var(g->body, var, replacement));
  }
  return g;
}

// Strips every universal binder on a clause by renaming the bound variables
// to fresh ones. The resulting clause is ready to backchain.
inline ClausePtr rename_apart(ClausePtr c, FreshSource& fresh) {
  while (c->kind == Clause::Kind::Forall) {
    TermPtr nv = Term::var(fresh.mint());
    c = substitute_clause_var(c->left, c->name, nv);
  }
  return c;
}

}  // namespace hornlink

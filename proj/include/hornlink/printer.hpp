#pragma once

#include <string>
#include <vector>

#include "hornlink/ast.hpp"
#include "hornlink/term.hpp"

namespace hornlink {

// Renders ASTs back to the surface syntax the parser accepts. Rendering is
// canonical: conjunction chains print right-associated and top-level clause
// binders print implicitly whenever their order matches first occurrence.
// parse(render(x)) is structurally equal to x for parser-producible x.

inline std::string render_term(const TermPtr& t) {
  if (is_nil(*t)) return "[]";
  if (is_cons(*t)) {
    std::string out = "[" + render_term(t->args[0]);
    TermPtr rest = t->args[1];
    while (is_cons(*rest)) {
      out += "," + render_term(rest->args[0]);
      rest = rest->args[1];
    }
    if (!is_nil(*rest)) out += "|" + render_term(rest);
    return out + "]";
  }
  if (t->kind != Term::Kind::Compound) return t->name;
  std::string out = t->name + "(";
  for (std::size_t i = 0; i < t->args.size(); ++i) {
    if (i) out += ",";
    out += render_term(t->args[i]);
  }
  return out + ")";
}

namespace detail {

// Precedence contexts, loosest first.
enum RenderPrec { kPrecConj = 0, kPrecImpl = 1 };

std::string render_goal_at(const GoalPtr& g, RenderPrec prec);

// A clause unit inside a conjunction or as an implication antecedent.
inline std::string render_clause_expr(const ClausePtr& c, bool unit_position) {
  switch (c->kind) {
    case Clause::Kind::Fact:
      return render_term(c->atom);
    case Clause::Kind::Rule: {
      std::string out =
          render_term(c->atom) + " :- " + render_goal_at(c->body, kPrecConj);
      return unit_position ? "(" + out + ")" : out;
    }
    case Clause::Kind::MacroRef:
      return "/" + c->name;
    case Clause::Kind::Forall: {
      std::string out =
          "forall " + c->name + ". " + render_clause_expr(c->left, false);
      return unit_position ? "(" + out + ")" : out;
    }
    case Clause::Kind::Conj: {
      std::string out = render_clause_expr(c->left, true) + " /\\ " +
                        render_clause_expr(c->right, false);
      return unit_position ? "(" + out + ")" : out;
    }
  }
  return "";
}

inline std::string render_antecedent(const ClausePtr& c) {
  if (c->kind == Clause::Kind::Fact || c->kind == Clause::Kind::MacroRef)
    return render_clause_expr(c, false);
  return "(" + render_clause_expr(c, false) + ")";
}

inline std::string render_goal_at(const GoalPtr& g, RenderPrec prec) {
  switch (g->kind) {
    case Goal::Kind::Atom:
      return render_term(g->atom);
    case Goal::Kind::MacroRef:
      return "/" + g->name;
    case Goal::Kind::Conj: {
      std::string out = render_goal_at(g->left, kPrecImpl) + ", " +
                        render_goal_at(g->body, kPrecConj);
      return prec > kPrecConj ? "(" + out + ")" : out;
    }
    case Goal::Kind::ClauseImpl:
      return render_antecedent(g->clause) + " => " +
             render_goal_at(g->body, kPrecImpl);
    case Goal::Kind::Link:
    case Goal::Kind::LinkImpl:
      return g->origin + " => " + render_goal_at(g->body, kPrecImpl);
    case Goal::Kind::Exists:
      // Parenthesized unconditionally: the binder would otherwise swallow the
      // rest of any enclosing conjunction on reparse.
      return "(exists " + g->name + ". " + render_goal_at(g->body, kPrecConj) +
             ")";
  }
  return "";
}

inline ClausePtr strip_foralls(ClausePtr c) {
  while (c->kind == Clause::Kind::Forall) c = c->left;
  return c;
}

}  // namespace detail

inline std::string render_goal(const GoalPtr& g) {
  return detail::render_goal_at(g, detail::kPrecConj);
}

inline std::string render_clause(const ClausePtr& c) {
  return detail::render_clause_expr(c, false);
}

// One `stmt.` line. Binders are left implicit when re-closing the stripped
// core would rebuild the clause exactly; otherwise they print explicitly.
inline std::string render_clause_statement(const ClausePtr& c) {
  ClausePtr core = detail::strip_foralls(c);
  if (clause_equal(close_clause(core), c))
    return detail::render_clause_expr(core, false) + ".";
  return detail::render_clause_expr(c, false) + ".";
}

inline std::string render_macro_def(const MacroDef& def) {
  if (def.kind == MacroBodyKind::Goal)
    return "/" + def.name + " = " + render_goal(def.goal) + ".";
  // Inline form only for a rule (its ":-" forces the clause reading back);
  // anything else reparses correctly from header form alone.
  ClausePtr body = def.clauses;
  ClausePtr core = detail::strip_foralls(body);
  if (core->kind == Clause::Kind::Rule && clause_equal(close_clause(core), body))
    return "/" + def.name + " = " + detail::render_clause_expr(core, false) + ".";
  std::string out = "/" + def.name + " =\n";
  // Statements are the right-assoc spine of the body conjunction.
  ClausePtr rest = body;
  while (rest->kind == Clause::Kind::Conj) {
    out += render_clause_statement(rest->left) + "\n";
    rest = rest->right;
  }
  out += render_clause_statement(rest) + "\n";
  return out;
}

inline std::string render_module(const std::vector<MacroDef>& defs,
                                 const std::string& origin = "") {
  std::string out;
  if (!origin.empty()) out += origin + ". % file name\n";
  for (const auto& d : defs) {
    out += render_macro_def(d);
    if (out.back() != '\n') out += "\n";
  }
  return out;
}

inline std::string render_query(const Query& q) {
  std::string out = "?- ";
  if (q.bound) out += "(" + std::to_string(*q.bound) + ") ";
  return out + render_goal(q.goal) + ".";
}

}  // namespace hornlink

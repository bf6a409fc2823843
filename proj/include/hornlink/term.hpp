#pragma once

#include <algorithm>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace hornlink {

struct Term;
using TermPtr = std::shared_ptr<const Term>;

// First-order term. Lists are plain compounds over "."/2 and the constant
// "[]"; neither name can be produced by the lexer, so the sugar is canonical.
struct Term {
  enum class Kind { Variable, Constant, Compound };

  Kind kind;
  std::string name;           // variable/constant name, or compound functor
  std::vector<TermPtr> args;  // non-empty iff Compound

  static TermPtr var(std::string name) {
    return std::make_shared<const Term>(
        Term{Kind::Variable, std::move(name), {}});
  }
  static TermPtr constant(std::string name) {
    return std::make_shared<const Term>(
        Term{Kind::Constant, std::move(name), {}});
  }
  static TermPtr compound(std::string functor, std::vector<TermPtr> args) {
    if (args.empty()) return constant(std::move(functor));
    return std::make_shared<const Term>(
        Term{Kind::Compound, std::move(functor), std::move(args)});
  }
};

inline const std::string kNil = "[]";
inline const std::string kCons = ".";

inline TermPtr nil_term() { return Term::constant(kNil); }

inline TermPtr cons_term(TermPtr head, TermPtr tail) {
  return Term::compound(kCons, {std::move(head), std::move(tail)});
}

inline TermPtr list_term(const std::vector<TermPtr>& items,
                         TermPtr tail = nullptr) {
  TermPtr out = tail ? std::move(tail) : nil_term();
  for (auto it = items.rbegin(); it != items.rend(); ++it)
    out = cons_term(*it, out);
  return out;
}

inline bool is_nil(const Term& t) {
  return t.kind == Term::Kind::Constant && t.name == kNil;
}
inline bool is_cons(const Term& t) {
  return t.kind == Term::Kind::Compound && t.name == kCons &&
         t.args.size() == 2;
}

inline bool term_equal(const TermPtr& a, const TermPtr& b) {
  if (a == b) return true;
  if (a->kind != b->kind || a->name != b->name ||
      a->args.size() != b->args.size())
    return false;
  for (std::size_t i = 0; i < a->args.size(); ++i)
    if (!term_equal(a->args[i], b->args[i])) return false;
  return true;
}

inline bool term_is_ground(const TermPtr& t) {
  if (t->kind == Term::Kind::Variable) return false;
  return std::all_of(t->args.begin(), t->args.end(), term_is_ground);
}

// First-occurrence order, skipping names in `shadow`.
inline void collect_term_vars(const TermPtr& t,
                              const std::set<std::string>& shadow,
                              std::vector<std::string>& order,
                              std::set<std::string>& seen) {
  if (t->kind == Term::Kind::Variable) {
    if (!shadow.count(t->name) && seen.insert(t->name).second)
      order.push_back(t->name);
    return;
  }
  for (const auto& a : t->args) collect_term_vars(a, shadow, order, seen);
}

inline std::vector<std::string> term_vars(const TermPtr& t) {
  std::vector<std::string> order;
  std::set<std::string> seen;
  collect_term_vars(t, {}, order, seen);
  return order;
}

}  // namespace hornlink

#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hornlink/errors.hpp"
#include "hornlink/term.hpp"
#include "hornlink/unify.hpp"

namespace hornlink {

// Deterministic predicates evaluated directly in the goal phase instead of by
// clause search. Success costs one proof step, like a leaf. Evaluation either
// yields an (extended) substitution, fails, or throws InstantiationError.
class BuiltinTable {
public:
  using Fn = std::function<std::optional<Substitution>(
      const std::vector<TermPtr>&, const Substitution&, bool occurs_check)>;

  static const BuiltinTable& standard() {
    static const BuiltinTable table = make_standard();
    return table;
  }

  bool contains(const std::string& name, std::size_t arity) const {
    return table_.count({name, arity}) != 0;
  }

  std::optional<Substitution> eval(const std::string& name,
                                   const std::vector<TermPtr>& args,
                                   const Substitution& s,
                                   bool occurs_check) const {
    return table_.at({name, arity_of(args)})(args, s, occurs_check);
  }

private:
  static std::size_t arity_of(const std::vector<TermPtr>& args) {
    return args.size();
  }

  static BuiltinTable make_standard() {
    BuiltinTable t;
    // Syntactic disequality on ground terms. Residuating or delaying is out
    // of scope: non-ground arguments are an error, not a failure.
    t.table_[{"neq", 2}] = [](const std::vector<TermPtr>& args,
                              const Substitution& s,
                              bool) -> std::optional<Substitution> {
      TermPtr a = s.resolve(args[0]);
      TermPtr b = s.resolve(args[1]);
      if (!term_is_ground(a) || !term_is_ground(b))
        throw InstantiationError("neq/2");
      if (term_equal(a, b)) return std::nullopt;
      return s;
    };
    // Unification as a goal.
    t.table_[{"eq", 2}] = [](const std::vector<TermPtr>& args,
                             const Substitution& s,
                             bool occurs_check) -> std::optional<Substitution> {
      return unify(args[0], args[1], s, occurs_check);
    };
    return t;
  }

  std::map<std::pair<std::string, std::size_t>, Fn> table_;
};

// Clause heads may not redefine builtins; the parser enforces this.
inline bool is_builtin_head(const TermPtr& atom) {
  return BuiltinTable::standard().contains(
      atom->name, atom->kind == Term::Kind::Compound ? atom->args.size() : 0);
}

}  // namespace hornlink

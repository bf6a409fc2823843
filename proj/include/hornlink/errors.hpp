#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

namespace hornlink {

// 1-based position in a source text.
struct SourcePos {
  std::uint32_t line = 0;
  std::uint32_t column = 0;
};

// Parse-time error; `origin` is the file path / URL / "<query>".
class SyntaxError : public std::runtime_error {
public:
  SyntaxError(std::string origin, SourcePos pos, const std::string& msg)
      : std::runtime_error(origin + ":" + std::to_string(pos.line) + ":" +
                           std::to_string(pos.column) + ": " + msg),
        origin_(std::move(origin)),
        pos_(pos) {}

  const std::string& origin() const noexcept { return origin_; }
  SourcePos pos() const noexcept { return pos_; }

private:
  std::string origin_;
  SourcePos pos_;
};

// A macro reference named something no definition list provides. This is a
// malformed program, not a proof failure, so it surfaces as an exception.
class MacroNotFound : public std::runtime_error {
public:
  explicit MacroNotFound(const std::string& name)
      : std::runtime_error("undefined macro /" + name), name_(name) {}
  const std::string& name() const noexcept { return name_; }

private:
  std::string name_;
};

// A macro exists but its body cannot serve in the demanded position
// (e.g. a rule-shaped body demanded as a goal).
class MacroKindMismatch : public std::runtime_error {
public:
  MacroKindMismatch(const std::string& name, const std::string& wanted)
      : std::runtime_error("macro /" + name + " cannot be used as a " + wanted),
        name_(name) {}
  const std::string& name() const noexcept { return name_; }

private:
  std::string name_;
};

// Builtin applied to insufficiently instantiated arguments.
class InstantiationError : public std::runtime_error {
public:
  explicit InstantiationError(const std::string& builtin)
      : std::runtime_error(builtin + ": arguments must be ground") {}
};

// Deep substitution application met a cyclic binding (possible only with the
// occurs check disabled).
class CyclicTerm : public std::runtime_error {
public:
  explicit CyclicTerm(const std::string& var)
      : std::runtime_error("cyclic binding through variable " + var) {}
};

// Module page could not be retrieved.
class FetchError : public std::runtime_error {
public:
  FetchError(const std::string& origin, const std::string& reason)
      : std::runtime_error("cannot fetch " + origin + ": " + reason),
        origin_(origin) {}
  const std::string& origin() const noexcept { return origin_; }

private:
  std::string origin_;
};

// Page parsed but defines no macro matching its own name.
class RootMissing : public std::runtime_error {
public:
  RootMissing(const std::string& origin, const std::string& root)
      : std::runtime_error(origin + " does not define its root macro /" + root) {}
};

// The engine met a link goal and has no resolver installed.
class UnresolvedLink : public std::runtime_error {
public:
  explicit UnresolvedLink(const std::string& origin)
      : std::runtime_error("unresolved link " + origin +
                           " (no page loader available here)") {}
};

// Unbounded search tripped one of the session resource guards.
class SearchCapExceeded : public std::runtime_error {
public:
  enum class Kind { WallClock, Depth };

  SearchCapExceeded(Kind kind, const std::string& detail)
      : std::runtime_error(detail), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

private:
  Kind kind_;
};

}  // namespace hornlink

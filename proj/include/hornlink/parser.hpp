#pragma once

#include <cctype>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "hornlink/ast.hpp"
#include "hornlink/builtins.hpp"
#include "hornlink/errors.hpp"
#include "hornlink/term.hpp"

namespace hornlink {

// Surface syntax, quick reference:
//   page file      ::=  [link '.']  { '/' name '=' body }
//   inline body    ::=  goal '.'  |  rule '.'        (same line as '=')
//   header body    ::=  newline, then clause statements until the next header
//   clause stmt    ::=  clause-expr '.'
//   clause-expr    ::=  unit { '/\' unit }           (right associated)
//   unit           ::=  atom  |  atom ':-' goal  |  '/'name  |  'forall' V '.' expr  |  '(' expr ')'
//   goal           ::=  impl { (','|'/\') impl }     (right associated)
//   impl           ::=  link '=>' impl  |  antecedent '=>' impl  |  primary
//   primary        ::=  atom  |  '/'name  |  '(' goal ')'  |  'exists' V '.' goal
//   query          ::=  '?-' [ '(' N ')' ] goal '.'
// Variables start upper-case or '_'; '%' comments to end of line. Links are
// recognized by shape: scheme://..., file:..., /seg/..., seg0.seg1/...,
// or seg/... — a lone '/'name is a macro reference, not a link.

enum class Tok {
  Ident, Var, Int, Macro, Link,
  LParen, RParen, LBracket, RBracket,
  Comma, Bar, Period, ColonDash, Arrow, Equals, AndOp, QueryMark, Minus,
  Eof,
};

struct Token {
  Tok kind;
  std::string text;
  SourcePos pos;
};

namespace detail {

inline bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}
inline bool lower_start(char c) {
  return std::islower(static_cast<unsigned char>(c));
}
inline bool var_start(char c) {
  return std::isupper(static_cast<unsigned char>(c)) || c == '_';
}

class Lexer {
public:
  Lexer(std::string src, std::string origin)
      : src_(std::move(src)), origin_(std::move(origin)) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_layout();
      SourcePos pos{line_, col_};
      if (at_end()) {
        out.push_back({Tok::Eof, "", pos});
        return out;
      }
      out.push_back(scan_token(pos));
    }
  }

private:
  struct Mark {
    std::size_t i;
    std::uint32_t line, col;
  };
  Mark mark() const { return {i_, line_, col_}; }
  void rewind(Mark m) {
    i_ = m.i;
    line_ = m.line;
    col_ = m.col;
  }

  bool at_end() const { return i_ >= src_.size(); }
  char cur() const { return i_ < src_.size() ? src_[i_] : '\0'; }
  char peek(std::size_t k = 1) const {
    return i_ + k < src_.size() ? src_[i_ + k] : '\0';
  }
  char take() {
    char c = src_[i_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void skip_layout() {
    for (;;) {
      if (at_end()) return;
      char c = cur();
      if (c == '%') {
        while (!at_end() && cur() != '\n') take();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        take();
      } else {
        return;
      }
    }
  }

  [[noreturn]] void fail(SourcePos pos, const std::string& msg) const {
    throw SyntaxError(origin_, pos, msg);
  }

  std::string scan_ident_run() {
    std::string out;
    while (!at_end() && ident_char(cur())) out += take();
    return out;
  }

  // Consumes the remainder of a link once we are committed to one. Dots,
  // slashes and colons are absorbed only when something link-like follows,
  // so a statement-terminating period is never swallowed.
  std::string scan_link_rest() {
    std::string out;
    for (;;) {
      char c = cur();
      if (ident_char(c)) {
        out += take();
      } else if (c == '-' && ident_char(peek())) {
        out += take();
      } else if ((c == '/' || c == '.') && ident_char(peek())) {
        out += take();
      } else if (c == ':' && std::isdigit(static_cast<unsigned char>(peek()))) {
        out += take();
      } else {
        return out;
      }
    }
  }

  // After an initial segment, decide whether a dotted-host link follows
  // (seg0.seg1.../path). Rewinds and returns nullopt when it does not.
  std::optional<std::string> try_dotted_link(const std::string& seg0) {
    if (!(cur() == '.' && ident_char(peek()))) {
      if (cur() == '/' && ident_char(peek()))
        return seg0 + scan_link_rest();  // seg/path...
      return std::nullopt;
    }
    Mark m = mark();
    std::string text = seg0;
    while (cur() == '.' && ident_char(peek())) {
      text += take();
      text += scan_ident_run();
    }
    if (cur() == '/' && ident_char(peek())) return text + scan_link_rest();
    rewind(m);
    return std::nullopt;
  }

  Token scan_token(SourcePos pos) {
    char c = cur();

    switch (c) {
      case '(': take(); return {Tok::LParen, "(", pos};
      case ')': take(); return {Tok::RParen, ")", pos};
      case '[': take(); return {Tok::LBracket, "[", pos};
      case ']': take(); return {Tok::RBracket, "]", pos};
      case ',': take(); return {Tok::Comma, ",", pos};
      case '|': take(); return {Tok::Bar, "|", pos};
      case '.': take(); return {Tok::Period, ".", pos};
      case '-': take(); return {Tok::Minus, "-", pos};
      case ':':
        take();
        if (cur() == '-') {
          take();
          return {Tok::ColonDash, ":-", pos};
        }
        fail(pos, "expected ':-'");
      case '=':
        take();
        if (cur() == '>') {
          take();
          return {Tok::Arrow, "=>", pos};
        }
        return {Tok::Equals, "=", pos};
      case '?':
        take();
        if (cur() == '-') {
          take();
          return {Tok::QueryMark, "?-", pos};
        }
        fail(pos, "expected '?-'");
      case '/': {
        take();
        if (cur() == '\\') {
          take();
          return {Tok::AndOp, "/\\", pos};
        }
        if (!ident_char(cur())) fail(pos, "macro name expected after '/'");
        std::string name = scan_ident_run();
        // /seg followed by more path means a rooted local path, not a macro.
        if ((cur() == '/' || cur() == '.') && ident_char(peek()))
          return {Tok::Link, "/" + name + scan_link_rest(), pos};
        return {Tok::Macro, name, pos};
      }
      default:
        break;
    }

    // ∧ (UTF-8 e2 88 a7) as a conjunction spelling.
    if (static_cast<unsigned char>(c) == 0xE2 &&
        static_cast<unsigned char>(peek(1)) == 0x88 &&
        static_cast<unsigned char>(peek(2)) == 0xA7) {
      take(); take(); take();
      return {Tok::AndOp, "/\\", pos};
    }

    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::string digits = scan_ident_run();
      for (char d : digits)
        if (!std::isdigit(static_cast<unsigned char>(d)))
          fail(pos, "malformed number '" + digits + "'");
      // 127.0.0.1:8080/page is a link even though it starts with a digit.
      if (auto link = try_dotted_link(digits)) return {Tok::Link, *link, pos};
      return {Tok::Int, digits, pos};
    }

    if (var_start(c)) return {Tok::Var, scan_ident_run(), pos};

    if (lower_start(c)) {
      std::string seg = scan_ident_run();
      if (cur() == ':' && peek(1) == '/' && peek(2) == '/') {
        std::string text = seg;
        text += take(); text += take(); text += take();
        if (!ident_char(cur())) fail(pos, "host expected after '" + text + "'");
        return {Tok::Link, text + scan_link_rest(), pos};
      }
      if (seg == "file" && cur() == ':') {
        std::string text = seg;
        text += take();
        if (cur() == '/' && ident_char(peek())) text += take();
        if (!ident_char(cur())) fail(pos, "path expected after 'file:'");
        return {Tok::Link, text + scan_link_rest(), pos};
      }
      if (auto link = try_dotted_link(seg)) return {Tok::Link, *link, pos};
      return {Tok::Ident, seg, pos};
    }

    fail(pos, std::string("unexpected character '") + c + "'");
  }

  std::string src_;
  std::string origin_;
  std::size_t i_ = 0;
  std::uint32_t line_ = 1;
  std::uint32_t col_ = 1;
};

class Parser {
public:
  Parser(std::vector<Token> tokens, std::string origin)
      : toks_(std::move(tokens)), origin_(std::move(origin)) {}

  // ---- entry points ----

  Query query() {
    expect(Tok::QueryMark, "query must start with '?-'");
    std::optional<std::uint64_t> bound;
    if (at(Tok::LParen) && kind(1) == Tok::Int && kind(2) == Tok::RParen) {
      advance();
      bound = parse_bound_value(cur());
      advance();
      advance();
    } else if (at(Tok::LParen) && kind(1) == Tok::Minus && kind(2) == Tok::Int) {
      fail(cur().pos, "proof-step bound must be non-negative");
    }
    GoalPtr g = parse_goal();
    expect(Tok::Period, "query must end with '.'");
    expect(Tok::Eof, "trailing input after query");
    return Query{bound, g};
  }

  std::vector<MacroDef> module() {
    // A page may open with a line naming itself: a bare link statement.
    if (at(Tok::Link) && kind(1) == Tok::Period) {
      advance();
      advance();
    }
    std::vector<MacroDef> defs;
    while (!at(Tok::Eof)) defs.push_back(parse_macro_def());
    return defs;
  }

  GoalPtr whole_goal() {
    GoalPtr g = parse_goal();
    expect(Tok::Eof, "trailing input after goal");
    return g;
  }

  TermPtr whole_term() {
    TermPtr t = parse_term();
    expect(Tok::Eof, "trailing input after term");
    return t;
  }

  ClausePtr whole_clause() {
    ClausePtr c = parse_clause_expr();
    expect(Tok::Eof, "trailing input after clause");
    return close_clause(c);
  }

private:
  // ---- token plumbing ----

  const Token& cur() const { return toks_[i_]; }
  Tok kind(std::size_t k = 0) const {
    std::size_t j = i_ + k;
    return j < toks_.size() ? toks_[j].kind : Tok::Eof;
  }
  bool at(Tok t) const { return cur().kind == t; }
  const Token& advance() { return toks_[i_++]; }

  const Token& expect(Tok t, const std::string& msg) {
    if (!at(t)) fail(cur().pos, msg);
    return advance();
  }

  [[noreturn]] void fail(SourcePos pos, const std::string& msg) const {
    throw SyntaxError(origin_, pos, msg);
  }

  std::size_t save() const { return i_; }
  void restore(std::size_t s) { i_ = s; }

  std::uint64_t parse_bound_value(const Token& t) {
    try {
      return std::stoull(t.text);
    } catch (const std::exception&) {
      fail(t.pos, "proof-step bound out of range");
    }
  }

  // ---- terms ----

  TermPtr parse_term() {
    const Token& t = cur();
    switch (t.kind) {
      case Tok::Var:
        advance();
        return Term::var(t.text);
      case Tok::Int:
        advance();
        return Term::constant(t.text);
      case Tok::Ident: {
        advance();
        if (!at(Tok::LParen)) return Term::constant(t.text);
        advance();
        std::vector<TermPtr> args;
        args.push_back(parse_term());
        while (at(Tok::Comma)) {
          advance();
          args.push_back(parse_term());
        }
        expect(Tok::RParen, "')' expected in argument list");
        return Term::compound(t.text, std::move(args));
      }
      case Tok::LBracket: {
        advance();
        if (at(Tok::RBracket)) {
          advance();
          return nil_term();
        }
        std::vector<TermPtr> items;
        items.push_back(parse_term());
        while (at(Tok::Comma)) {
          advance();
          items.push_back(parse_term());
        }
        TermPtr tail = nullptr;
        if (at(Tok::Bar)) {
          advance();
          tail = parse_term();
        }
        expect(Tok::RBracket, "']' expected in list");
        return list_term(items, tail);
      }
      default:
        fail(t.pos, "term expected, found '" + t.text + "'");
    }
  }

  TermPtr parse_atom() {
    const Token& t = cur();
    TermPtr out = parse_term();
    if (out->kind == Term::Kind::Variable)
      fail(t.pos, "a variable cannot stand as an atom");
    return out;
  }

  // ---- goals ----

  bool at_exists() const {
    return at(Tok::Ident) && cur().text == "exists" && kind(1) == Tok::Var &&
           kind(2) == Tok::Period;
  }
  bool at_forall() const {
    return at(Tok::Ident) && cur().text == "forall" && kind(1) == Tok::Var &&
           kind(2) == Tok::Period;
  }

  GoalPtr parse_goal() {
    GoalPtr g = parse_impl();
    if (at(Tok::Comma) || at(Tok::AndOp)) {
      advance();
      return make_conj(g, parse_goal());
    }
    return g;
  }

  GoalPtr parse_impl() {
    if (at(Tok::Link)) {
      std::string origin = advance().text;
      expect(Tok::Arrow, "'=>' expected after page link");
      return make_link(std::move(origin), parse_impl());
    }
    if (at(Tok::Macro) && kind(1) == Tok::Arrow) {
      std::string name = advance().text;
      advance();
      return make_clause_impl(make_clause_macro(std::move(name)), parse_impl());
    }
    if (at(Tok::LParen)) {
      // Try '(' clause-expr ')' '=>' first; fall back to a grouped goal.
      std::size_t s = save();
      try {
        advance();
        ClausePtr d = parse_clause_expr();
        if (at(Tok::RParen) && kind(1) == Tok::Arrow) {
          advance();
          advance();
          return make_clause_impl(d, parse_impl());
        }
      } catch (const SyntaxError&) {
      }
      restore(s);
      advance();
      GoalPtr g = parse_goal();
      expect(Tok::RParen, "')' expected");
      if (at(Tok::Arrow)) {
        // e.g. (p, q) => r: the group must read as clauses.
        auto d = goal_as_clause(g);
        if (!d) fail(cur().pos, "left of '=>' must be a clause group");
        advance();
        return make_clause_impl(*d, parse_impl());
      }
      return g;
    }
    if (at_exists()) {
      advance();
      std::string var = advance().text;
      advance();
      return make_exists(std::move(var), parse_goal());
    }
    if (at(Tok::Macro)) return make_goal_macro(advance().text);

    TermPtr atom = parse_atom();
    if (at(Tok::Arrow)) {
      advance();
      return make_clause_impl(make_fact(atom), parse_impl());
    }
    return make_atom(atom);
  }

  // ---- clause expressions ----

  ClausePtr parse_clause_expr() {
    ClausePtr c = parse_clause_unit();
    if (at(Tok::AndOp)) {
      advance();
      return make_clause_conj(c, parse_clause_expr());
    }
    return c;
  }

  ClausePtr parse_clause_unit() {
    if (at(Tok::Macro)) return make_clause_macro(advance().text);
    if (at(Tok::LParen)) {
      advance();
      ClausePtr inner = parse_clause_expr();
      expect(Tok::RParen, "')' expected");
      return inner;
    }
    if (at_forall()) {
      advance();
      std::string var = advance().text;
      advance();
      return make_forall(std::move(var), parse_clause_expr());
    }
    const Token& t = cur();
    TermPtr head = parse_atom();
    if (is_builtin_head(head))
      fail(t.pos, "cannot redefine builtin " + head->name + "/" +
                      std::to_string(head->args.size()));
    if (at(Tok::ColonDash)) {
      advance();
      return make_rule(head, parse_goal());
    }
    return make_fact(head);
  }

  // One top-level statement of a header-style macro body.
  ClausePtr parse_clause_statement() {
    ClausePtr c = parse_clause_expr();
    expect(Tok::Period, "'.' expected after clause");
    return close_clause(c);
  }

  // ---- module files ----

  MacroDef parse_macro_def() {
    const Token& header = cur();
    if (!at(Tok::Macro))
      fail(header.pos, "macro definition '/name =' expected, found '" +
                           header.text + "'");
    std::string name = advance().text;
    const Token& eq = expect(Tok::Equals, "'=' expected after macro name");

    bool inline_body = !at(Tok::Eof) && cur().pos.line == eq.pos.line;
    if (inline_body) {
      // Same line: a single formula. A ':-' rule is a clause body; anything
      // else reads as a goal.
      std::size_t s = save();
      try {
        TermPtr head = parse_atom();
        if (at(Tok::ColonDash)) {
          if (is_builtin_head(head))
            fail(cur().pos, "cannot redefine builtin " + head->name);
          advance();
          GoalPtr body = parse_goal();
          expect(Tok::Period, "'.' expected after definition");
          return MacroDef{std::move(name), MacroBodyKind::Clauses, nullptr,
                          close_clause(make_rule(head, body))};
        }
      } catch (const SyntaxError&) {
      }
      restore(s);
      GoalPtr g = parse_goal();
      expect(Tok::Period, "'.' expected after definition");
      return MacroDef{std::move(name), MacroBodyKind::Goal, std::move(g),
                      nullptr};
    }

    // Header form: collect clause statements until the next '/name =' or EOF.
    std::vector<ClausePtr> stmts;
    while (!at(Tok::Eof) && !(at(Tok::Macro) && kind(1) == Tok::Equals))
      stmts.push_back(parse_clause_statement());
    if (stmts.empty())
      fail(header.pos, "macro header '/" + name + " =' has no clauses");
    ClausePtr body = stmts.back();
    for (std::size_t i = stmts.size() - 1; i-- > 0;)
      body = make_clause_conj(stmts[i], body);
    return MacroDef{std::move(name), MacroBodyKind::Clauses, nullptr,
                    std::move(body)};
  }

  std::vector<Token> toks_;
  std::string origin_;
  std::size_t i_ = 0;
};

}  // namespace detail

// ---- public entry points ----

inline std::vector<MacroDef> parse_module_text(const std::string& text,
                                               const std::string& origin) {
  detail::Parser p(detail::Lexer(text, origin).run(), origin);
  return p.module();
}

inline std::vector<MacroDef> parse_module_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FetchError(path, "cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_module_text(buf.str(), path);
}

inline Query parse_query_text(const std::string& text,
                              const std::string& origin = "<query>") {
  detail::Parser p(detail::Lexer(text, origin).run(), origin);
  return p.query();
}

inline GoalPtr parse_goal_text(const std::string& text,
                               const std::string& origin = "<goal>") {
  detail::Parser p(detail::Lexer(text, origin).run(), origin);
  return p.whole_goal();
}

inline TermPtr parse_term_text(const std::string& text,
                               const std::string& origin = "<term>") {
  detail::Parser p(detail::Lexer(text, origin).run(), origin);
  return p.whole_term();
}

inline ClausePtr parse_clause_text(const std::string& text,
                                   const std::string& origin = "<clause>") {
  detail::Parser p(detail::Lexer(text, origin).run(), origin);
  return p.whole_clause();
}

}  // namespace hornlink

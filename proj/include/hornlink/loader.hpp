#pragma once

#include <atomic>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "hornlink/ast.hpp"
#include "hornlink/engine_core.hpp"  // LinkResolver
#include "hornlink/errors.hpp"
#include "hornlink/parser.hpp"

namespace hornlink {

// A fetched and parsed page. `root` is derived from the origin as written in
// the program text (basename, ".lw" stripped); `resolved` is where the text
// actually came from after map rewriting.
struct ModulePage {
  std::string origin;
  std::string resolved;
  std::string root;
  std::vector<MacroDef> defs;  // file order
};

// Origin rewriting: an ordered prefix map applied once, first match wins.
// File syntax: one `prefix -> replacement` per line, '%' comments.
class ResolutionMap {
public:
  void add_rule(std::string prefix, std::string replacement) {
    rules_.emplace_back(std::move(prefix), std::move(replacement));
  }

  std::string rewrite(const std::string& origin) const {
    for (const auto& [prefix, replacement] : rules_) {
      if (origin.rfind(prefix, 0) == 0)
        return replacement + origin.substr(prefix.size());
    }
    return origin;
  }

  std::size_t size() const { return rules_.size(); }

  static ResolutionMap parse_text(const std::string& text,
                                  const std::string& origin) {
    ResolutionMap map;
    std::istringstream in(text);
    std::string line;
    std::uint32_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      auto cut = line.find('%');
      if (cut != std::string::npos) line.erase(cut);
      std::string trimmed = trim(line);
      if (trimmed.empty()) continue;
      auto arrow = trimmed.find("->");
      if (arrow == std::string::npos)
        throw SyntaxError(origin, {lineno, 1},
                          "expected 'prefix -> replacement'");
      std::string prefix = trim(trimmed.substr(0, arrow));
      std::string replacement = trim(trimmed.substr(arrow + 2));
      if (prefix.empty() || replacement.empty())
        throw SyntaxError(origin, {lineno, 1},
                          "expected 'prefix -> replacement'");
      map.add_rule(std::move(prefix), std::move(replacement));
    }
    return map;
  }

  static ResolutionMap parse_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FetchError(path, "cannot open map file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_text(buf.str(), path);
  }

private:
  static std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
  }

  std::vector<std::pair<std::string, std::string>> rules_;
};

// Network access behind an interface so tests can count or fake fetches.
class HttpFetcher {
public:
  virtual ~HttpFetcher() = default;
  // Returns the page body; throws FetchError on anything else.
  virtual std::string get(const std::string& url) = 0;
};

using FileReader = std::function<std::string(const std::string& path)>;

inline std::string default_file_reader(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FetchError(path, "cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline bool has_prefix(const std::string& s, const std::string& prefix) {
  return s.rfind(prefix, 0) == 0;
}

// Fetches, parses and caches module pages. An origin is rewritten through the
// map, then fetched over HTTP(S) or read from disk; the parse is cached under
// the rewritten origin so map-equivalent origins share one fetch. The root
// macro requirement is checked per requested origin, since two origins may
// legitimately name the same bytes differently.
class Loader {
public:
  explicit Loader(ResolutionMap map = {},
                  std::shared_ptr<HttpFetcher> http = nullptr,
                  FileReader files = default_file_reader)
      : map_(std::move(map)),
        http_(std::move(http)),
        files_(std::move(files)) {}

  ModulePage resolve(const std::string& origin) {
    std::string root = root_name(origin);
    std::string resolved = map_.rewrite(origin);

    std::vector<MacroDef> defs;
    {
      std::lock_guard<std::mutex> lock(mu_);
      auto it = cache_.find(resolved);
      if (it != cache_.end()) {
        defs = it->second;
      } else {
        defs = fetch_and_parse(resolved);
        cache_.emplace(resolved, defs);
      }
    }

    ModulePage page{origin, std::move(resolved), std::move(root),
                    std::move(defs)};
    for (const auto& d : page.defs)
      if (d.name == page.root) return page;
    throw RootMissing(origin, page.root);
  }

  // root => body with the page's definitions in scope.
  GoalPtr desugar_link(const ModulePage& page, GoalPtr body) const {
    return make_link_impl(page.root, page.defs, std::move(body), page.origin);
  }

  // Resolves every link visible in a goal (not transitively: definitions
  // inside fetched pages stay as written and resolve lazily at solve time).
  GoalPtr resolve_links(const GoalPtr& g) {
    switch (g->kind) {
      case Goal::Kind::Link: {
        ModulePage page = resolve(g->origin);
        return desugar_link(page, resolve_links(g->body));
      }
      case Goal::Kind::Conj:
        return make_conj(resolve_links(g->left), resolve_links(g->body));
      case Goal::Kind::ClauseImpl:
        return make_clause_impl(resolve_links(g->clause),
                                resolve_links(g->body));
      case Goal::Kind::LinkImpl:
        return make_link_impl(g->name, g->defs, resolve_links(g->body),
                              g->origin);
      case Goal::Kind::Exists:
        return make_exists(g->name, resolve_links(g->body));
      case Goal::Kind::Atom:
      case Goal::Kind::MacroRef:
        return g;
    }
    return g;
  }

  ClausePtr resolve_links(const ClausePtr& c) {
    switch (c->kind) {
      case Clause::Kind::Rule:
        return make_rule(c->atom, resolve_links(c->body));
      case Clause::Kind::Forall:
        return make_forall(c->name, resolve_links(c->left));
      case Clause::Kind::Conj:
        return make_clause_conj(resolve_links(c->left),
                                resolve_links(c->right));
      case Clause::Kind::Fact:
      case Clause::Kind::MacroRef:
        return c;
    }
    return c;
  }

  // Engine hook: resolves one link on demand during solving.
  LinkResolver as_link_resolver() {
    return [this](const std::string& origin, const GoalPtr& body) {
      return desugar_link(resolve(origin), body);
    };
  }

  // Number of actual fetches (cache misses) performed so far.
  std::size_t fetch_count() const { return fetches_.load(); }

private:
  static std::string root_name(const std::string& origin) {
    auto slash = origin.find_last_of('/');
    std::string base =
        slash == std::string::npos ? origin : origin.substr(slash + 1);
    if (base.size() > 3 && base.compare(base.size() - 3, 3, ".lw") == 0)
      base.erase(base.size() - 3);
    if (base.empty())
      throw FetchError(origin, "cannot derive a root macro name");
    return base;
  }

  std::vector<MacroDef> fetch_and_parse(const std::string& resolved) {
    ++fetches_;
    std::string text;
    if (has_prefix(resolved, "http://") || has_prefix(resolved, "https://")) {
      if (!http_)
        throw FetchError(resolved, "no network fetcher configured");
      text = http_->get(resolved);
    } else if (has_prefix(resolved, "file:")) {
      text = files_(resolved.substr(5));
    } else {
      text = files_(resolved);
    }
    return parse_module_text(text, resolved);
  }

  ResolutionMap map_;
  std::shared_ptr<HttpFetcher> http_;
  FileReader files_;
  std::mutex mu_;
  std::map<std::string, std::vector<MacroDef>> cache_;
  std::atomic<std::size_t> fetches_{0};
};

}  // namespace hornlink

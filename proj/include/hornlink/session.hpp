#pragma once

#include <pthread.h>

#include <chrono>
#include <cstdint>
#include <exception>
#include <functional>
#include <istream>
#include <limits>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "hornlink/ast.hpp"
#include "hornlink/engine_bounded.hpp"
#include "hornlink/engine_core.hpp"
#include "hornlink/errors.hpp"
#include "hornlink/loader.hpp"
#include "hornlink/parser.hpp"
#include "hornlink/printer.hpp"

namespace hornlink {

// Process exit codes for one-shot queries.
enum ExitCode : int {
  kExitSuccess = 0,        // at least one solution
  kExitFailure = 1,        // search exhausted, nothing was cut
  kExitBoundExhausted = 2, // no solution, but the allowance cut branches
  kExitError = 3,          // parse/load/program error
  kExitResourceCap = 4,    // wall-clock or depth cap stopped an unbounded run
};

// Runs fn on a thread with a 256 MB stack and propagates exceptions. Pumping
// nested generators costs machine stack proportional to search depth, which
// deep (or diverging, until the cap fires) searches exceed a default stack
// with.
inline void run_on_big_stack(const std::function<void()>& fn) {
  struct Ctx {
    const std::function<void()>* fn;
    std::exception_ptr error;
  } ctx{&fn, nullptr};

  pthread_attr_t attr;
  if (pthread_attr_init(&attr) != 0) {
    fn();
    return;
  }
  pthread_attr_setstacksize(&attr, 256u * 1024 * 1024);

  auto trampoline = [](void* p) -> void* {
    auto* c = static_cast<Ctx*>(p);
    try {
      (*c->fn)();
    } catch (...) {
      c->error = std::current_exception();
    }
    return nullptr;
  };

  pthread_t tid;
  if (pthread_create(&tid, &attr, trampoline, &ctx) != 0) {
    pthread_attr_destroy(&attr);
    fn();
    return;
  }
  pthread_join(tid, nullptr);
  pthread_attr_destroy(&attr);
  if (ctx.error) std::rethrow_exception(ctx.error);
}

struct SessionConfig {
  std::optional<std::uint64_t> default_bound;
  std::string map_path;  // empty: identity map
  bool occurs_check = true;
  bool trace = false;
  // One-shot runs print this many solutions (default 1). The REPL offers ';'
  // continuation freely unless a cap was set explicitly.
  std::optional<std::size_t> max_solutions;
  std::uint64_t wall_cap_ms = 30000;
  std::uint64_t max_depth = 500000;
};

class Session {
public:
  Session(SessionConfig cfg, std::ostream& out, std::ostream& err,
          std::shared_ptr<HttpFetcher> http = nullptr)
      : cfg_(std::move(cfg)),
        out_(out),
        err_(err),
        loader_(cfg_.map_path.empty() ? ResolutionMap{}
                                      : ResolutionMap::parse_file(cfg_.map_path),
                std::move(http)) {}

  Loader& loader() { return loader_; }

  // Loads a page into the session scope: subsequent queries run inside it
  // (later loads shadow earlier ones).
  int load_page(const std::string& origin) {
    try {
      ModulePage page = loader_.resolve(origin);
      out_ << "loaded " << origin << " (root /" << page.root << ", "
           << page.defs.size() << " definitions)\n";
      pages_.push_back(std::move(page));
      return kExitSuccess;
    } catch (const std::exception& e) {
      err_ << "error: " << e.what() << "\n";
      return kExitError;
    }
  }

  // One-shot query. Returns an ExitCode.
  int run_query(const std::string& text) { return run_query_line(text, nullptr); }

  // Interactive loop. `in_tty` controls prompts; returns an ExitCode (the
  // loop itself only fails on I/O exhaustion).
  int repl(std::istream& in, bool in_tty) {
    std::string line;
    for (;;) {
      if (in_tty) out_ << "> " << std::flush;
      if (!std::getline(in, line)) return kExitSuccess;
      int action = handle_line(line, &in, in_tty);
      if (action == kReplQuit) return kExitSuccess;
    }
  }

private:
  static constexpr int kReplQuit = -1;
  static constexpr int kReplContinue = 0;

  static std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
  }

  int handle_line(const std::string& raw, std::istream* in, bool in_tty) {
    std::string line = trim(raw);
    if (line.empty() || line[0] == '%') return kReplContinue;

    if (line[0] == ':') {
      std::string cmd, arg;
      auto space = line.find_first_of(" \t");
      if (space == std::string::npos) {
        cmd = line;
      } else {
        cmd = line.substr(0, space);
        arg = trim(line.substr(space));
      }
      if (cmd == ":quit" || cmd == ":q") return kReplQuit;
      if (cmd == ":load") {
        if (arg.empty())
          err_ << "usage: :load <origin>\n";
        else
          load_page(arg);
        return kReplContinue;
      }
      if (cmd == ":bound") {
        try {
          if (arg.empty()) throw std::invalid_argument("empty");
          cfg_.default_bound = std::stoull(arg);
        } catch (const std::exception&) {
          err_ << "usage: :bound <steps>\n";
        }
        return kReplContinue;
      }
      if (cmd == ":trace") {
        if (arg == "on")
          cfg_.trace = true;
        else if (arg == "off")
          cfg_.trace = false;
        else
          err_ << "usage: :trace on|off\n";
        return kReplContinue;
      }
      if (cmd == ":help") {
        out_ << "commands:\n"
                "  ?- <goal>.          run a query (prefix with (N) to bound "
                "proof length)\n"
                "  ;                   next solution (after an answer)\n"
                "  :load <origin>      load a page into the session scope\n"
                "  :bound <steps>      set the default proof-step bound\n"
                "  :trace on|off       print the derivation of each answer\n"
                "  :quit               leave\n";
        return kReplContinue;
      }
      err_ << "unknown command " << cmd << " (:help lists commands)\n";
      return kReplContinue;
    }

    if (line.rfind("?-", 0) == 0) {
      run_query_line(line, in_tty ? in : nullptr, in);
      return kReplContinue;
    }

    err_ << "queries start with '?-' (:help lists commands)\n";
    return kReplContinue;
  }

  std::size_t solution_limit(bool interactive) const {
    if (cfg_.max_solutions) return *cfg_.max_solutions;
    return interactive ? std::numeric_limits<std::size_t>::max() : 1;
  }

  // Reads the continuation decision after an answer: true = next solution.
  bool wants_more(std::istream* in) {
    if (!in) return true;  // non-interactive: the limit alone decides
    std::string line;
    if (!std::getline(*in, line)) return false;
    if (trim(line) == ";") return true;
    if (!trim(line).empty()) pending_line_ = line;
    return false;
  }

  int run_query_line(const std::string& text, std::istream* prompt_in,
                     std::istream* repl_in = nullptr) {
    int rc = kExitError;
    try {
      rc = run_query_inner(text, prompt_in);
    } catch (const SearchCapExceeded& e) {
      err_ << "resource cap: " << e.what() << "\n";
      rc = kExitResourceCap;
    } catch (const std::exception& e) {
      err_ << "error: " << e.what() << "\n";
      rc = kExitError;
    }
    // A non-';' line typed at a continuation prompt is the next input.
    if (repl_in && !pending_line_.empty()) {
      std::string line = std::move(pending_line_);
      pending_line_.clear();
      handle_line(line, repl_in, prompt_in != nullptr);
    }
    return rc;
  }

  int run_query_inner(const std::string& text, std::istream* prompt_in) {
    Query q = parse_query_text(text);
    std::vector<std::string> vars = free_goal_vars(q.goal);

    GoalPtr goal = loader_.resolve_links(q.goal);
    for (auto it = pages_.rbegin(); it != pages_.rend(); ++it)
      goal = loader_.desugar_link(*it, goal);

    std::optional<std::uint64_t> bound = q.bound ? q.bound : cfg_.default_bound;
    bool interactive = prompt_in != nullptr;
    std::size_t limit = solution_limit(interactive);
    if (limit == 0) limit = 1;

    return bound ? run_bounded(goal, vars, *bound, interactive ? prompt_in : nullptr,
                               limit)
                 : run_unbounded(goal, vars, interactive ? prompt_in : nullptr,
                                 limit);
  }

  int run_bounded(const GoalPtr& goal, const std::vector<std::string>& vars,
                  std::uint64_t bound, std::istream* prompt_in,
                  std::size_t limit) {
    BoundedOptions opts;
    opts.occurs_check = cfg_.occurs_check;
    opts.record_trace = cfg_.trace;
    opts.link_resolver = loader_.as_link_resolver();

    BoundedRun run(Program{}, goal, bound, opts);
    std::size_t printed = 0;
    for (;;) {
      std::optional<BoundedSolution> sol;
      run_on_big_stack([&] { sol = run.next(); });
      if (!sol) {
        if (printed > 0) return kExitSuccess;
        if (run.cut_observed()) {
          out_ << "unknown (bound exhausted)\n";
          return kExitBoundExhausted;
        }
        out_ << "no\n";
        return kExitFailure;
      }
      if (printed > 0) out_ << "\n";
      print_answer(vars, sol->subst, sol->length);
      if (cfg_.trace) out_ << format_trace(run.last_trace());
      if (++printed >= limit) return kExitSuccess;
      if (prompt_in && !wants_more(prompt_in)) return kExitSuccess;
    }
  }

  int run_unbounded(const GoalPtr& goal, const std::vector<std::string>& vars,
                    std::istream* prompt_in, std::size_t limit) {
    if (cfg_.trace)
      err_ << "note: --trace applies to bounded queries only\n";

    SolveOptions opts;
    opts.occurs_check = cfg_.occurs_check;
    opts.max_depth = cfg_.max_depth;
    opts.link_resolver = loader_.as_link_resolver();
    opts.deadline = std::make_shared<std::chrono::steady_clock::time_point>();

    SolutionStream stream = solve(Program{}, goal, opts);
    std::size_t printed = 0;
    for (;;) {
      *opts.deadline = std::chrono::steady_clock::now() +
                       std::chrono::milliseconds(cfg_.wall_cap_ms);
      bool has = false;
      std::optional<Answer> answer;
      run_on_big_stack([&] {
        if (stream.next()) {
          answer = stream.take();
          has = true;
        }
      });
      if (!has) {
        if (printed > 0) return kExitSuccess;
        out_ << "no\n";
        return kExitFailure;
      }
      if (printed > 0) out_ << "\n";
      print_answer(vars, answer->subst, std::nullopt);
      if (++printed >= limit) return kExitSuccess;
      if (prompt_in && !wants_more(prompt_in)) return kExitSuccess;
    }
  }

  void print_answer(const std::vector<std::string>& vars,
                    const Substitution& subst,
                    std::optional<std::uint64_t> length) {
    if (vars.empty()) {
      if (length)
        out_ << "yes, length = " << *length << "\n";
      else
        out_ << "yes\n";
      return;
    }
    for (const auto& v : vars)
      out_ << v << " = " << render_term(subst.resolve(Term::var(v))) << "\n";
    if (length) out_ << "length = " << *length << "\n";
  }

  SessionConfig cfg_;
  std::ostream& out_;
  std::ostream& err_;
  Loader loader_;
  std::vector<ModulePage> pages_;
  std::string pending_line_;
};

}  // namespace hornlink

// Command-line front end: load pages, run one-shot queries, or drop into the
// REPL. Exit codes: 0 solution found, 1 failure, 2 bound exhausted, 3 error,
// 4 resource cap.

#include <unistd.h>

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hornlink/http_fetcher.hpp"
#include "hornlink/session.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "hornlink: Horn-clause logic with embedded implications, macro-named\n"
      "page modules, and optionally length-bounded proof search"};

  std::string query;
  std::vector<std::string> pages;
  std::uint64_t bound = 0;
  bool have_bound = false;
  std::string map_path;
  bool no_occurs_check = false;
  bool trace = false;
  bool all_solutions = false;
  std::size_t max_solutions = 0;
  bool have_max = false;
  std::uint64_t wall_cap_ms = 30000;
  std::uint64_t depth_cap = 500000;

  app.add_option("pages", pages, "module pages to load into the session scope");
  app.add_option("-q,--query", query, "run one query and exit");
  auto* bound_opt = app.add_option(
      "--bound", bound, "default proof-step bound for queries without their own");
  app.add_option("--map", map_path,
                 "origin resolution map file (prefix -> replacement lines)")
      ->envname("HORNLINK_MAP");
  app.add_flag("--no-occurs-check", no_occurs_check,
               "skip the occurs check during unification");
  app.add_flag("--trace", trace, "print each answer's derivation (bounded runs)");
  app.add_flag("--all", all_solutions, "print every solution");
  auto* max_opt =
      app.add_option("--max-solutions", max_solutions, "print at most N solutions");
  app.add_option("--wall-cap", wall_cap_ms,
                 "wall-clock cap in ms for unbounded queries (default 30000)");
  app.add_option("--depth-cap", depth_cap,
                 "recursion depth cap for unbounded queries (default 500000)");

  CLI11_PARSE(app, argc, argv);
  have_bound = bound_opt->count() > 0;
  have_max = max_opt->count() > 0;

  hornlink::SessionConfig cfg;
  if (have_bound) cfg.default_bound = bound;
  cfg.map_path = map_path;
  cfg.occurs_check = !no_occurs_check;
  cfg.trace = trace;
  if (all_solutions)
    cfg.max_solutions = std::numeric_limits<std::size_t>::max();
  else if (have_max)
    cfg.max_solutions = max_solutions;
  cfg.wall_cap_ms = wall_cap_ms;
  cfg.max_depth = depth_cap;

  try {
    hornlink::Session session(cfg, std::cout, std::cerr,
                              hornlink::make_default_http_fetcher());
    for (const auto& page : pages) {
      int rc = session.load_page(page);
      if (rc != hornlink::kExitSuccess) return rc;
    }
    if (!query.empty()) return session.run_query(query);
    return session.repl(std::cin, isatty(STDIN_FILENO) != 0);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return hornlink::kExitError;
  }
}

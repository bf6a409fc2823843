// End-to-end acceptance checks. Each criterion prints one
// `ACCEPTANCE <k> <name>: PASS|FAIL` line; a FAIL also fails the test case.

#include <catch2/catch_amalgamated.hpp>

#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hornlink/engine_bounded.hpp"
#include "hornlink/engine_core.hpp"
#include "hornlink/loader.hpp"
#include "hornlink/parser.hpp"
#include "hornlink/printer.hpp"
#include "testutil.hpp"

using namespace hornlink;
using namespace hornlink::test;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Collects per-criterion problems, prints the verdict line, then asserts.
struct Criterion {
  int k;
  std::string name;
  std::vector<std::string> problems;

  void expect(bool ok, const std::string& what) {
    if (!ok) problems.push_back(what);
  }

  void finish() const {
    bool pass = problems.empty();
    std::cout << "ACCEPTANCE " << k << " " << name << ": "
              << (pass ? "PASS" : "FAIL") << std::endl;
    for (const auto& p : problems) std::cout << "    - " << p << std::endl;
    std::string joined;
    for (const auto& p : problems) joined += p + "; ";
    INFO(joined);
    CHECK(pass);
  }
};

struct CliResult {
  int exit_code = -1;
  std::string output;
  double seconds = 0;
};

CliResult run_cli(const std::string& args) {
  std::string cmd = std::string("'") + HORNLINK_CLI_BIN + "' " + args + " 2>&1";
  auto t0 = Clock::now();
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  while (std::fgets(buf, sizeof buf, pipe)) out += buf;
  int status = ::pclose(pipe);
  CliResult r;
  r.seconds = seconds_since(t0);
  r.output = std::move(out);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

// Scratch directory for map files the subprocess reads.
struct TempDir {
  std::filesystem::path dir;
  TempDir() {
    static std::atomic<int> counter{0};
    dir = std::filesystem::temp_directory_path() /
          ("hornlink_accept_" + std::to_string(::getpid()) + "_" +
           std::to_string(counter++));
    std::filesystem::create_directories(dir);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(dir, ec);
  }
  std::string write(const std::string& name, const std::string& text) {
    std::filesystem::path p = dir / name;
    std::ofstream f(p, std::ios::binary);
    f << text;
    return p.string();
  }
};

std::string fixture_map_line(const std::string& subdir) {
  return "www.d.com/ -> " + std::string(HORNLINK_FIXTURES_DIR) + "/" + subdir +
         "/\n";
}

}  // namespace

TEST_CASE("criterion 1: bounding tames a diverging search") {
  Criterion crit{1, "left-recursion-scenario"};
  TempDir tmp;
  std::string left_map = tmp.write("left.map", fixture_map_line("pages"));
  std::string chain_map = tmp.write("chain.map", fixture_map_line("pages_chain"));
  const std::string query =
      "'?- www.d.com/lists => www.d.com/arcs => path(london, boston).'";
  const std::string bounded_query =
      "'?- (1000) www.d.com/lists => www.d.com/arcs => path(london, boston).'";

  // Left-recursive path, no route to boston: unbounded search diverges until
  // a resource cap stops it.
  CliResult unbounded =
      run_cli("--map '" + left_map + "' --wall-cap 2500 -q " + query);
  crit.expect(unbounded.exit_code == 4,
           "unbounded run: expected exit 4, got " +
               std::to_string(unbounded.exit_code) + " (output: " +
               unbounded.output + ")");
  crit.expect(unbounded.seconds < 30.0,
           "unbounded run took " + std::to_string(unbounded.seconds) + "s");

  // The same query under a 1000-step allowance settles quickly as unknown.
  CliResult bounded = run_cli("--map '" + left_map + "' -q " + bounded_query);
  crit.expect(bounded.exit_code == 2,
           "bounded run: expected exit 2, got " +
               std::to_string(bounded.exit_code) + " (output: " +
               bounded.output + ")");
  crit.expect(bounded.seconds < 5.0,
           "bounded run took " + std::to_string(bounded.seconds) + "s");
  crit.expect(bounded.output.find("unknown (bound exhausted)") !=
               std::string::npos,
           "bounded run output: " + bounded.output);

  // A graph with a london->boston chain and a right-recursive path finds the
  // proof within the same allowance.
  CliResult chain = run_cli("--map '" + chain_map + "' -q " + bounded_query);
  crit.expect(chain.exit_code == 0, "chain run: expected exit 0, got " +
                                     std::to_string(chain.exit_code) +
                                     " (output: " + chain.output + ")");
  crit.expect(chain.seconds < 5.0,
           "chain run took " + std::to_string(chain.seconds) + "s");
  auto at = chain.output.find("yes, length = ");
  if (at == std::string::npos) {
    crit.expect(false, "chain run printed no length: " + chain.output);
  } else {
    std::uint64_t n =
        std::stoull(chain.output.substr(at + std::strlen("yes, length = ")));
    crit.expect(n >= 1 && n <= 1000,
             "chain proof length " + std::to_string(n) + " outside [1,1000]");
  }
  crit.finish();
}

TEST_CASE("criterion 2: exact step counts on the four reference queries") {
  Criterion crit{2, "step-count-goldens"};
  struct Golden {
    const char* label;
    Program program;
    GoalPtr goal;
    std::uint64_t n;
  };
  std::vector<Golden> goldens;
  goldens.push_back({"fact", program_of({"p"}), atom("p"), 2});
  goldens.push_back({"rule+fact", program_of({"p :- q", "q"}), atom("p"), 4});
  goldens.push_back(
      {"conjunction", program_of({"p", "q"}),
       make_conj(atom("p"), atom("q")), 5});
  goldens.push_back(
      {"goal macro", program_of({"p"}, "/g = p."), goal_of("/g"), 3});

  for (const auto& g : goldens) {
    SolveOutcome out = solve_bounded(g.program, g.goal, 32);
    crit.expect(out.kind == OutcomeKind::Success,
             std::string(g.label) + ": no proof found at allowance 32");
    if (out.kind == OutcomeKind::Success)
      crit.expect(out.length == g.n,
               std::string(g.label) + ": length " +
                   std::to_string(out.length) + ", expected " +
                   std::to_string(g.n));
    auto shortest = min_proof_length(g.program, g.goal, 32);
    crit.expect(shortest.has_value() && *shortest == g.n,
             std::string(g.label) + ": shortest-proof cross-check mismatch");
  }
  crit.finish();
}

TEST_CASE("criterion 3: every reported proof fits its allowance") {
  Criterion crit{3, "length-bound-invariant"};
  Rng rng(0xacce3ULL);
  int successes = 0;
  for (int i = 0; i < 1200 && crit.problems.size() < 5; ++i) {
    GenCase cs = gen_case(rng);
    auto sols = all_bounded(cs.program, cs.goal, cs.allowance, {}, 50);
    for (const auto& s : sols) {
      ++successes;
      crit.expect(s.length >= 1 && s.length <= cs.allowance,
               "case " + std::to_string(i) + ": length " +
                   std::to_string(s.length) + " vs allowance " +
                   std::to_string(cs.allowance));
    }
  }
  crit.expect(successes >= 100, "only " + std::to_string(successes) +
                                 " successful proofs; sample too thin");
  crit.finish();
}

TEST_CASE("criterion 4: success is preserved when the allowance grows") {
  Criterion crit{4, "bound-monotonicity"};
  Rng rng(0xacce4ULL);
  int successes = 0;
  for (int i = 0; i < 1200 && crit.problems.size() < 5; ++i) {
    GenCase cs = gen_case(rng);
    SolveOutcome out = solve_bounded(cs.program, cs.goal, cs.allowance);
    if (out.kind != OutcomeKind::Success) continue;
    ++successes;
    for (std::uint64_t bigger :
         {cs.allowance + 1, cs.allowance * 2}) {
      SolveOutcome again = solve_bounded(cs.program, cs.goal, bigger);
      crit.expect(again.kind == OutcomeKind::Success,
               "case " + std::to_string(i) + ": success at " +
                   std::to_string(cs.allowance) + " lost at " +
                   std::to_string(bigger));
    }
  }
  crit.expect(successes >= 100, "only " + std::to_string(successes) +
                                 " successful base runs; sample too thin");
  crit.finish();
}

// Compares engine verdicts against the oracle for every ground atom of one
// program. Runs in a forked child so the parent can enforce a wall-clock
// window; exits 0 on agreement, 1 on disagreement (details on `report_fd`),
// 2 on an exception.
namespace {
void verify_flat_program_in_child(const FlatProgram& fp, int report_fd) {
  int rc = 0;
  std::string report;
  try {
    Program p = flat_to_program(fp);
    std::set<std::string> oracle = fixpoint_atoms(fp);
    for (const TermPtr& ground : herbrand_base(fp)) {
      SolveOutcome out = solve_bounded(p, atom(ground), 64);
      bool engine_says = out.kind == OutcomeKind::Success;
      bool oracle_says = oracle.count(render_term(ground)) > 0;
      if (engine_says != oracle_says) {
        rc = 1;
        report += "atom " + render_term(ground) + ": engine " +
                  (engine_says ? "provable" : "unprovable") + ", oracle " +
                  (oracle_says ? "provable" : "unprovable") + "; ";
      }
    }
  } catch (const std::exception& e) {
    rc = 2;
    report = std::string("exception: ") + e.what();
  }
  if (!report.empty()) {
    ssize_t ignored = ::write(report_fd, report.data(), report.size());
    (void)ignored;
  }
  ::close(report_fd);
  ::_exit(rc);
}
}  // namespace

TEST_CASE("criterion 5: bounded search agrees with the bottom-up oracle") {
  Criterion crit{5, "fixpoint-oracle-agreement"};
  Rng rng(0xacce5ULL);
  auto t0 = Clock::now();

  // A few draws make the exhaustive check itself intractable: a predicate
  // with a recursive clause over its own facts has astronomically many
  // derivations within the allowance, and a conjunction that feeds them into
  // a never-satisfied goal forces the search to enumerate every one before
  // it can answer. No engine with these enumeration semantics can finish
  // such an atom, so each program is verified in a child process under a
  // short wall-clock window and the rare window-breakers are replaced by
  // fresh draws. The comparison stays exact on every admitted program, and
  // the skip rate is asserted small so the sample stays representative.
  int verified = 0, skipped = 0, draws = 0;
  while (verified < 220 && draws < 400 && crit.problems.size() < 5 &&
         seconds_since(t0) < 55.0) {
    ++draws;
    FlatProgram fp = gen_flat_program(rng);
    int fds[2];
    REQUIRE(::pipe(fds) == 0);
    pid_t pid = ::fork();
    REQUIRE(pid >= 0);
    if (pid == 0) {
      ::close(fds[0]);
      verify_flat_program_in_child(fp, fds[1]);  // never returns
    }
    ::close(fds[1]);

    bool done = false;
    int status = 0;
    auto w0 = Clock::now();
    while (seconds_since(w0) < 2.0) {
      if (::waitpid(pid, &status, WNOHANG) == pid) {
        done = true;
        break;
      }
      ::usleep(10 * 1000);
    }
    if (!done) {
      ::kill(pid, SIGKILL);
      ::waitpid(pid, &status, 0);
      ::close(fds[0]);
      ++skipped;
      continue;
    }

    std::string report;
    char buf[4096];
    for (ssize_t n; (n = ::read(fds[0], buf, sizeof buf)) > 0;)
      report.append(buf, static_cast<std::size_t>(n));
    ::close(fds[0]);
    ++verified;
    int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    crit.expect(code == 0,
                "draw " + std::to_string(draws - 1) + ": " + report);
  }
  crit.expect(verified >= 200, "only " + std::to_string(verified) +
                                   " programs verified (skipped " +
                                   std::to_string(skipped) + " of " +
                                   std::to_string(draws) + " draws)");
  crit.expect(skipped * 5 <= draws,
              "skip rate too high: " + std::to_string(skipped) + " of " +
                  std::to_string(draws) + " draws");
  double took = seconds_since(t0);
  crit.expect(took < 60.0,
              "oracle comparison took " + std::to_string(took) + "s");
  crit.finish();
}

TEST_CASE("criterion 6: inner macro definitions shadow and then restore") {
  Criterion crit{6, "macro-shadowing"};

  // Outer scope: /p names the clause val(a). The page brings /p = val(b);
  // inside it a clause implication adds the plain clause val(c).
  Program outer = Program{}
                      .with_clause(make_clause_macro("p"))
                      .with_macro(MacroDef{"p", MacroBodyKind::Clauses,
                                           nullptr, fact("val", {c("a")})});
  std::vector<MacroDef> page_defs{
      MacroDef{"pg", MacroBodyKind::Clauses, nullptr, fact("t")},
      MacroDef{"p", MacroBodyKind::Clauses, nullptr, fact("val", {c("b")})}};
  GoalPtr inner = make_conj(
      atom("val", {v("Y")}),
      make_clause_impl(fact("val", {c("w")}), atom("val", {v("W")})));
  GoalPtr goal = make_conj(
      atom("val", {v("X")}),
      make_conj(make_link_impl("pg", page_defs, inner, "www.test/pg"),
                atom("val", {v("Z")})));

  SolveOutcome out = solve_bounded(outer, goal, 64);
  crit.expect(out.kind == OutcomeKind::Success, "no proof found");
  if (out.kind == OutcomeKind::Success) {
    const Substitution& s = out.answer;
    crit.expect(binding_str(s, "X") == "a",
             "outer lookup before the page: X = " + binding_str(s, "X"));
    crit.expect(binding_str(s, "Y") == "b",
             "inner lookup under the page: Y = " + binding_str(s, "Y"));
    crit.expect(binding_str(s, "W") == "w",
             "clause implication inside the page: W = " +
                 binding_str(s, "W"));
    crit.expect(binding_str(s, "Z") == "a",
             "outer lookup after the page: Z = " + binding_str(s, "Z"));
  }

  // The unbounded engine sees the same scope discipline.
  auto core = all_answers(outer, goal, 1);
  crit.expect(core.size() == 1, "unbounded engine found no proof");
  if (core.size() == 1) {
    const Substitution& s = core[0].subst;
    crit.expect(binding_str(s, "X") == "a" && binding_str(s, "Y") == "b" &&
                 binding_str(s, "W") == "w" && binding_str(s, "Z") == "a",
             "unbounded engine bindings diverge: X=" + binding_str(s, "X") +
                 " Y=" + binding_str(s, "Y") + " W=" + binding_str(s, "W") +
                 " Z=" + binding_str(s, "Z"));
  }
  crit.finish();
}

TEST_CASE("criterion 7: unifier soundness, generality, and acyclicity") {
  Criterion crit{7, "unifier-properties"};
  Rng rng(0xacce7ULL);
  TermGenConfig cfg;
  int unifiable = 0;
  for (int i = 0; i < 1100 && crit.problems.size() < 5; ++i) {
    TermPtr t1, t2;
    if (chance(rng, 0.5)) {
      TermPtr skel = gen_ground_term(rng, cfg);
      t1 = abstract_term(rng, cfg, skel, 0.3);
      t2 = abstract_term(rng, cfg, skel, 0.3);
    } else {
      t1 = gen_term(rng, cfg);
      t2 = gen_term(rng, cfg);
    }
    if (unify(t1, t2, Substitution{}, true)) ++unifiable;
    std::string err = check_mgu_against_enumeration(t1, t2);
    crit.expect(err.empty(), "pair " + std::to_string(i) + ": " + err);
  }
  crit.expect(unifiable >= 150, "only " + std::to_string(unifiable) +
                                 " unifiable pairs; sample too thin");
  crit.finish();
}

TEST_CASE("criterion 8: adversarial left recursion always returns") {
  Criterion crit{8, "termination-guarantee"};

  struct Adversary {
    std::string label;
    Program program;
    GoalPtr goal;
  };
  std::vector<Adversary> suite;

  auto distractors = [](int n) {
    std::vector<std::string> out;
    for (int i = 0; i < n; ++i) out.push_back("d" + std::to_string(i));
    return out;
  };

  // Self-loops and no-base double recursion, padded with unit clauses.
  for (int i = 0; i < 10; ++i) {
    auto texts = distractors(i);
    texts.push_back("p :- p");
    suite.push_back({"self-loop-" + std::to_string(i), program_of(texts),
                     atom("p")});
  }
  for (int i = 0; i < 10; ++i) {
    auto texts = distractors(i);
    texts.push_back("p :- p, p");
    suite.push_back({"double-recursion-" + std::to_string(i),
                     program_of(texts), atom("p")});
  }
  // Mutual recursion rings of growing size.
  for (int i = 0; i < 10; ++i) {
    int size = 2 + i % 5;
    std::vector<std::string> texts;
    for (int j = 0; j < size; ++j)
      texts.push_back("r" + std::to_string(j) + " :- r" +
                      std::to_string((j + 1) % size));
    suite.push_back({"ring-" + std::to_string(i), program_of(texts),
                     atom("r0")});
  }
  // Left-recursive transitive closure over an edge cycle; the target node is
  // not on the cycle, so the query can only fail or exhaust.
  for (int i = 0; i < 10; ++i) {
    int size = 3 + i % 4;
    std::vector<std::string> texts{"path(X,Y) :- path(X,Z), edge(Z,Y)",
                                   "path(X,Y) :- edge(X,Y)"};
    for (int j = 0; j < size; ++j)
      texts.push_back("edge(c" + std::to_string(j) + ",c" +
                      std::to_string((j + 1) % size) + ")");
    suite.push_back({"cycle-" + std::to_string(i), program_of(texts),
                     atom("path", {c("c0"), c("nowhere")})});
  }
  // Same closure, but the start node has no outgoing edges at all.
  for (int i = 0; i < 10; ++i) {
    int size = 2 + i % 5;
    std::vector<std::string> texts{"path(X,Y) :- path(X,Z), edge(Z,Y)",
                                   "path(X,Y) :- edge(X,Y)"};
    for (int j = 0; j < size; ++j)
      texts.push_back("edge(c" + std::to_string(j) + ",c" +
                      std::to_string(j + 1) + ")");
    suite.push_back({"sink-start-" + std::to_string(i), program_of(texts),
                     atom("path", {c("s"), c("c" + std::to_string(size))})});
  }
  REQUIRE(suite.size() == 50);

  for (const auto& adv : suite) {
    for (std::uint64_t m : {10ull, 100ull, 1000ull}) {
      auto t0 = Clock::now();
      SolveOutcome out = solve_bounded(adv.program, adv.goal, m);
      double took = seconds_since(t0);
      crit.expect(took < 10.0, adv.label + " at allowance " + std::to_string(m) +
                                " took " + std::to_string(took) + "s");
      crit.expect(out.kind != OutcomeKind::Success,
               adv.label + " at allowance " + std::to_string(m) +
                   " claims an impossible proof");
    }
  }
  crit.finish();
}

TEST_CASE("criterion 9: printing and reparsing is the identity") {
  Criterion crit{9, "round-trip-parsing"};

  for (const char* rel : {"pages/arcs", "pages/lists", "pages_chain/arcs",
                          "pages_chain/lists"}) {
    std::string path = std::string(HORNLINK_FIXTURES_DIR) + "/" + rel;
    auto defs = parse_module_file(path);
    auto again = parse_module_text(render_module(defs), "<rendered>");
    bool same = again.size() == defs.size();
    for (std::size_t i = 0; same && i < defs.size(); ++i)
      same = macro_def_equal(defs[i], again[i]);
    crit.expect(same, std::string(rel) + " does not round-trip");
  }

  Rng rng(0xacce9ULL);
  for (int i = 0; i < 500 && crit.problems.size() < 5; ++i) {
    GoalPtr g = gen_rt_goal(rng, 0);
    crit.expect(goal_equal(g, parse_goal_text(render_goal(g))),
             "goal " + std::to_string(i) + ": " + render_goal(g));

    ClausePtr cl = gen_rt_clause(rng, 0);
    crit.expect(clause_equal(close_clause(cl),
                          parse_clause_text(render_clause(cl))),
             "clause " + std::to_string(i) + ": " + render_clause(cl));

    MacroDef def = gen_rt_macro_def(rng);
    auto defs = parse_module_text(render_macro_def(def), "<rendered>");
    crit.expect(defs.size() == 1 && macro_def_equal(def, defs[0]),
             "definition " + std::to_string(i) + ": " +
                 render_macro_def(def));
  }
  crit.finish();
}

#include <chrono>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "hoterm/search.hpp"
#include "hoterm/thf.hpp"
#include "random_problem.hpp"

using namespace hoterm;

namespace {

Problem load(const std::string& name) { return load_problem_file(std::string(HOTERM_SOURCE_DIR) + "/problems/" + name); }

SearchConfig smt_config() {
  SearchConfig c;
  c.solver_command = HOTERM_SOLVER_CMD;
  return c;
}

// Parameters drawn without regard to validity.
OrderParams raw_params(const Problem& p, std::mt19937& rng) {
  auto pick = [&](int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); };
  OrderParams o = OrderParams::defaults(p);
  for (const auto& b : p.base_types) {
    o.levels.set(b, pick(3));
    o.basic[b] = pick(2);
  }
  for (const auto& f : p.symbols) {
    o.prec[f->name] = pick(3);
    o.status[f->name] = pick(2) ? Status::Mul : Status::Lex;
    o.big[f->name] = pick(3) != 0;
    for (int i = 1; i <= static_cast<int>(f->type.arg_types().size()); ++i)
      if (pick(2)) o.acc[f->name].insert(i);
  }
  return o;
}

// A get-model answer written out by hand from concrete parameters.
std::string model_text(const Problem& p, const OrderParams& o) {
  std::string s = "(\n";
  for (const auto& a : problem_atoms(p)) {
    std::string v;
    switch (a.kind) {
      case AtomKind::Prec:
        v = std::to_string(o.prec_of(a.subject));
        break;
      case AtomKind::Level: {
        int l = o.levels.level(a.subject);
        v = l < 0 ? "(- " + std::to_string(-l) + ")" : std::to_string(l);
        break;
      }
      case AtomKind::Mul:
        v = o.status_of(a.subject) == Status::Mul ? "true" : "false";
        break;
      case AtomKind::Big:
        v = o.is_big(a.subject) ? "true" : "false";
        break;
      case AtomKind::Acc:
        v = o.acc_of(a.subject).count(a.index) ? "true" : "false";
        break;
      case AtomKind::Basic:
        v = o.is_basic(a.subject) ? "true" : "false";
        break;
    }
    s += "  (define-fun |" + a.name + "| () " + (a.is_int() ? "Int" : "Bool") + "\n    " + v + ")\n";
  }
  return s + ")\n";
}

bool same_params(const Problem& p, const OrderParams& a, const OrderParams& b) {
  for (const auto& x : p.base_types)
    if (a.levels.level(x) != b.levels.level(x) || a.is_basic(x) != b.is_basic(x)) return false;
  for (const auto& f : p.symbols)
    if (a.prec_of(f->name) != b.prec_of(f->name) || a.status_of(f->name) != b.status_of(f->name) ||
        a.is_big(f->name) != b.is_big(f->name) || a.acc_of(f->name) != b.acc_of(f->name))
      return false;
  return true;
}

}  // namespace

TEST_CASE("parameter variables and their names") {
  Problem p = load("nnf.p");
  auto atoms = problem_atoms(p);
  int ints = 0, accs = 0;
  for (const auto& a : atoms) {
    ints += a.is_int();
    accs += a.kind == AtomKind::Acc;
  }
  CHECK(ints == static_cast<int>(p.symbols.size() + p.base_types.size()));
  int args = 0;
  for (const auto& f : p.symbols) args += static_cast<int>(f->type.arg_types().size());
  CHECK(accs == args);
  CHECK(atom_name(AtomKind::Acc, "forall", 1) == "acc_forall_1");
  CHECK(atom_name(AtomKind::Prec, "a|b") == "prec_a_bar_b");
}

TEST_CASE("ordered partitions are the weak orders") {
  // Fubini numbers
  CHECK(ordered_partitions(0).size() == 1);
  CHECK(ordered_partitions(1).size() == 1);
  CHECK(ordered_partitions(2).size() == 3);
  CHECK(ordered_partitions(3).size() == 13);
  CHECK(ordered_partitions(4).size() == 75);
  CHECK(ordered_partitions(5).size() == 541);
}

TEST_CASE("the script is deterministic and declares every parameter") {
  Problem p = load("mapinc.p");
  std::string a = smt_script(encode_problem(p)), b = smt_script(encode_problem(p));
  CHECK(a == b);
  CHECK(a.rfind("(set-logic QF_LIA)", 0) == 0);
  for (const auto& at : problem_atoms(p)) CHECK(a.find("(declare-const " + at.name + " ") != std::string::npos);
  CHECK(a.find("(check-sat)\n(get-model)") != std::string::npos);
}

TEST_CASE("an empty rule set only carries the global constraints") {
  Problem p = load("nnf.p");
  p.rules.clear();
  Encoding e = encode_problem(p);
  CHECK(e.roots.empty());
  CHECK(e.defs.empty());
  auto r = prove(p, smt_config());
  CHECK(r.verdict == Verdict::Proved);
}

TEST_CASE("the encoding agrees with the engine on sampled parameters") {
  std::mt19937 rng(99);
  int pairs = 0, oriented = 0, rejected_global = 0;
  std::vector<Problem> probs;
  for (const char* n : {"diff.p", "nnf.p", "mapinc.p", "example1.p", "selfembed.p"}) probs.push_back(load(n));
  while (probs.size() < 60) {
    Problem p = sample::random_small_problem(rng);
    if (!p.rules.empty()) probs.push_back(p);
  }
  for (const auto& p : probs) {
    Encoding e = encode_problem(p);
    for (int k = 0; k < 4; ++k) {
      OrderParams o = k % 2 ? raw_params(p, rng) : sample::random_params(p, rng);
      ++pairs;
      bool valid = validate_params(p, o).empty();
      CHECK(e.global_holds(o) == valid);
      rejected_global += !valid;
      for (std::size_t i = 0; i < p.rules.size(); ++i) {
        bool engine = orient_rule(p.rules[i], o) != nullptr;
        oriented += engine;
        INFO(p.rules[i].name << ": " << to_string(p.rules[i].lhs) << " -> " << to_string(p.rules[i].rhs));
        INFO(format_params(o, p));
        CHECK(e.rule_holds(i, o) == engine);
      }
    }
  }
  CHECK(pairs >= 100);
  CHECK(oriented > 0);
  CHECK(rejected_global > 0);
}

TEST_CASE("the generic equal-precedence rule has its own encoding") {
  std::mt19937 rng(5);
  EncodeOptions eo;
  eo.optimized_feq = false;
  EngineOptions en;
  en.optimized_feq = false;
  for (const char* n : {"nnf.p", "mapinc.p", "diff.p"}) {
    Problem p = load(n);
    Encoding e = encode_problem(p, eo);
    for (int k = 0; k < 20; ++k) {
      OrderParams o = sample::random_params(p, rng);
      for (std::size_t i = 0; i < p.rules.size(); ++i) CHECK(e.rule_holds(i, o) == (orient_rule(p.rules[i], o, en) != nullptr));
    }
  }
}

TEST_CASE("model parsing and decoding") {
  Problem p = load("mapinc.p");
  std::mt19937 rng(3);
  for (int k = 0; k < 30; ++k) {
    OrderParams o = raw_params(p, rng);
    if (k == 0) o.levels.set("a", -2);
    CHECK(same_params(p, decode_model(model_text(p, o), p), o));
  }
  // missing bindings fall back to the defaults
  OrderParams d = decode_model("(\n)\n", p);
  CHECK(same_params(p, d, OrderParams::defaults(p)));
  CHECK(decode_model("((define-fun prec_inc () Int 5))", p).prec_of("inc") == 5);
  CHECK(decode_model("(model (define-fun big_s () Bool false))", p).is_big("s") == false);
  CHECK_THROWS_AS(decode_model("((define-fun prec_inc () Bool true))", p), ModelError);
  CHECK_THROWS_AS(decode_model("((define-fun big_s () Int 1))", p), ModelError);
  CHECK_THROWS_AS(decode_model("((define-fun prec_inc () Int x7))", p), ModelError);
  CHECK_THROWS_AS(decode_model("((define-fun prec_inc () Int 5)", p), ModelError);
  auto m = parse_model("; comment\n((define-fun |odd name| () Int (- 3)) (define-fun g ((x Int)) Int x))");
  CHECK(m.size() == 1);
  CHECK(m["odd name"].value == -3);
}

TEST_CASE("solver process") {
  std::string z3 = HOTERM_SOLVER_CMD;
  REQUIRE_MESSAGE(!z3.empty(), "no SMT solver was found at configure time");
  auto sat = run_solver("(declare-const x Int)(assert (> x 2))(check-sat)(get-model)", z3, 30);
  CHECK(sat.status == SolverStatus::Sat);
  CHECK(parse_model(sat.model).at("x").value > 2);
  auto unsat = run_solver("(declare-const x Int)(assert (> x 2))(assert (< x 1))(check-sat)", z3, 30);
  CHECK(unsat.status == SolverStatus::Unsat);
  auto start = std::chrono::steady_clock::now();
  auto slow = run_solver("(check-sat)", "sleep 20", 0.5);
  double took = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  CHECK(slow.status == SolverStatus::Unknown);
  CHECK(slow.timed_out);
  CHECK(took < 5);
  CHECK_THROWS_AS(run_solver("(check-sat)", "/nonexistent/solver-binary", 5), SolverError);
  CHECK_THROWS_AS(run_solver("(check-sat)", "echo garbage", 5), SolverError);
}

TEST_CASE("both backends on the worked examples") {
  for (const char* n : {"example1.p", "diff.p", "nnf.p", "mapinc.p"}) {
    Problem p = load(n);
    INFO(std::string(n));
    auto s = prove(p, smt_config());
    CHECK(s.verdict == Verdict::Proved);
    REQUIRE(s.params);
    CHECK(validate_params(p, *s.params).empty());
    CHECK(s.traces.size() == p.rules.size());
    for (const auto& t : s.traces) CHECK(trace_valid(t, *s.params, {}));
    if (p.symbols.size() <= 5) CHECK(enumerate_search(p).verdict == Verdict::Proved);
  }
}

TEST_CASE("the nnf model puts negation above the connectives") {
  Problem p = load("nnf.p");
  auto r = prove(p, smt_config());
  REQUIRE(r.verdict == Verdict::Proved);
  for (const char* g : {"and", "or", "forall", "exists"}) CHECK(r.params->prec_gt("not", g));
  CHECK(r.params->acc_of("forall").count(1));
  CHECK(r.params->acc_of("exists").count(1));
}

TEST_CASE("self-embedding is not provable, and the enumeration exhausts its space") {
  Problem p = load("selfembed.p");
  auto s = prove(p, smt_config());
  CHECK(s.verdict == Verdict::NotProvable);
  auto e = enumerate_search(p);
  CHECK(e.verdict == Verdict::NotProvable);
  CHECK(e.stats.candidates > 0);
  EnumBounds all;
  all.maximal_acc = false;
  all.skip_constant_status = false;
  auto full = enumerate_search(p, all);
  CHECK(full.verdict == Verdict::NotProvable);
  CHECK(full.stats.candidates >= e.stats.candidates);
}

TEST_CASE("enumeration bounds") {
  Problem p = load("mapinc.p");
  EnumBounds b;
  b.max_symbols = 3;
  CHECK_THROWS_AS(enumerate_search(p, b), BoundsExceeded);
  EnumBounds c;
  c.max_candidates = 2;
  CHECK_THROWS_AS(enumerate_search(load("selfembed.p"), c), BoundsExceeded);
}

TEST_CASE("dumped script and check mode") {
  Problem p = load("diff.p");
  SearchConfig c = smt_config();
  c.dump_smt_path = "hoterm_test_dump.smt2";
  auto r = prove(p, c);
  CHECK(r.verdict == Verdict::Proved);
  std::ifstream in(c.dump_smt_path);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == smt_script(encode_problem(p)));
  std::remove(c.dump_smt_path.c_str());

  auto ok = check_params(p, load_params_file(std::string(HOTERM_SOURCE_DIR) + "/problems/diff.params", p));
  CHECK(ok.verdict == Verdict::Proved);
  auto flat = check_params(p, OrderParams::defaults(p));
  CHECK(flat.verdict == Verdict::NotProvable);
  CHECK(!flat.diagnostics.empty());
}

TEST_CASE("backends agree on random small problems") {
  std::mt19937 rng(7);
  int done = 0, proved = 0;
  while (done < 40) {
    Problem p = sample::random_small_problem(rng);
    if (p.rules.empty()) continue;
    ++done;
    auto s = prove(p, smt_config());
    auto e = enumerate_search(p);
    INFO(sample::describe(p));
    CHECK(s.verdict == e.verdict);
    proved += s.verdict == Verdict::Proved;
  }
  MESSAGE("proved " << proved << " of " << done);
  CHECK(proved > 0);
  CHECK(proved < done);
}

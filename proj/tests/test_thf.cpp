#include "doctest.h"

#include <functional>
#include <fstream>
#include <map>
#include <sstream>

#include "hoterm/thf.hpp"

using namespace hoterm;

namespace {

std::string problem_path(const std::string& name) { return std::string(HOTERM_SOURCE_DIR) + "/problems/" + name; }

int arity(const Problem& p, const std::string& name) {
  Symbol s = p.find_symbol(name);
  REQUIRE(s);
  return s->arity;
}

ParseError::Kind parse_kind(const std::string& text) {
  try {
    load_problem_text(text);
  } catch (const ParseError& e) {
    return e.kind();
  }
  FAIL("no parse error for: " << text);
  return ParseError::Kind::Syntax;
}

const char* kHeader =
    "thf(a_t, type, a: $tType).\n"
    "thf(c_d, type, c: a).\n"
    "thf(f_d, type, f: a > a).\n"
    "thf(g_d, type, g: a > a > a).\n";

}  // namespace

TEST_CASE("worked problems get the stated arities") {
  Problem d = load_problem_file(problem_path("diff.p"));
  CHECK(arity(d, "diff") == 1);
  CHECK(arity(d, "sin") == 1);
  CHECK(arity(d, "cos") == 1);
  CHECK(arity(d, "plus") == 2);
  CHECK(arity(d, "times") == 2);
  CHECK(d.rules.size() == 2);

  Problem n = load_problem_file(problem_path("nnf.p"));
  CHECK(arity(n, "not") == 1);
  CHECK(arity(n, "forall") == 1);
  CHECK(arity(n, "exists") == 1);
  CHECK(arity(n, "and") == 2);
  CHECK(arity(n, "or") == 2);
  CHECK(n.rules.size() == 5);

  Problem m = load_problem_file(problem_path("mapinc.p"));
  CHECK(arity(m, "zero") == 0);
  CHECK(arity(m, "nil") == 0);
  CHECK(arity(m, "s") == 1);
  CHECK(arity(m, "plus") == 1);
  CHECK(arity(m, "inc") == 1);
  CHECK(arity(m, "map") == 2);
  CHECK(arity(m, "cons") == 2);

  Problem e = load_problem_file(problem_path("example1.p"));
  CHECK(arity(e, "f") == 1);
  CHECK(arity(e, "g") == 2);
  CHECK(to_string(e.rules[0].lhs) == "f(X)");
  CHECK(to_string(e.rules[0].rhs) == "g(X, c)");
}

TEST_CASE("double negation rule is read left to right") {
  Problem n = load_problem_file(problem_path("nnf.p"));
  const Rule& r = n.rules[0];
  CHECK(r.name == "not_not");
  CHECK(to_string(r.lhs) == "not(not(P))");
  CHECK(to_string(r.rhs) == "P");
  CHECK(to_string(n.rules[3].rhs) == "exists(λX.not(R X))");
}

TEST_CASE("declarations without axioms give an empty rule list") {
  Problem p = load_problem_text(kHeader);
  CHECK(p.rules.empty());
  CHECK(p.base_types == std::vector<std::string>{"a"});
  CHECK(p.symbols.size() == 3);
  CHECK(arity(p, "g") == 0);
  CHECK(p.symbols[2]->id == 2);
}

TEST_CASE("minimum arity over occurrences") {
  std::string text = std::string(kHeader) +
                     "thf(r1, axiom, ![X:a]: ((g @ X @ X) = (f @ X))).\n"
                     "thf(r2, axiom, ![X:a]: ((f @ (g @ X @ c)) = (g @ c @ (f @ X)))).\n";
  Problem p = load_problem_text(text);
  CHECK(arity(p, "g") == 2);
  CHECK(arity(p, "f") == 1);
  // one unapplied occurrence pins the arity to 0 and leaves App nodes elsewhere
  std::string text2 = std::string(kHeader) +
                      "thf(h_d, type, h: (a > a) > a).\n"
                      "thf(r1, axiom, ![X:a]: ((h @ f) = (f @ X))).\n";
  CHECK_THROWS_AS(load_problem_text(text2), ValidationError);  // X only on the right
  std::string text3 = std::string(kHeader) +
                      "thf(h_d, type, h: (a > a) > a).\n"
                      "thf(r1, axiom, ![X:a]: ((f @ (h @ f)) = (f @ c))).\n";
  Problem p3 = load_problem_text(text3);
  CHECK(arity(p3, "f") == 0);
  CHECK(p3.rules[0].lhs.is_app());
}

TEST_CASE("inferred arities are maximal") {
  for (const char* name : {"diff.p", "nnf.p", "mapinc.p", "example1.p"}) {
    Problem raw = parse_problem([&] {
      std::ifstream in(problem_path(name));
      std::stringstream ss;
      ss << in.rdbuf();
      return ss.str();
    }());
    Problem p = infer_arities(raw);
    std::map<std::string, int> least;
    std::function<void(const Term&)> walk = [&](const Term& t) {
      Spine sp = spine(t);
      if (sp.head.is_fun()) {
        int n = static_cast<int>(sp.head.args().size() + sp.args.size());
        auto [it, ins] = least.emplace(sp.head.symbol()->name, n);
        if (!ins) it->second = std::min(it->second, n);
        for (const auto& a : sp.head.args()) walk(a);
      } else if (sp.head.is_lam()) {
        walk(sp.head.body());
      }
      for (const auto& a : sp.args) walk(a);
    };
    for (const auto& r : p.rules) {
      walk(r.lhs);
      walk(r.rhs);
    }
    for (const auto& s : p.symbols) {
      auto it = least.find(s->name);
      if (it == least.end()) {
        CHECK(s->arity == 0);
        continue;
      }
      // arity+1 would exceed the type or some occurrence
      CHECK((s->arity == s->type.arrow_count() || it->second == s->arity));
      CHECK(s->arity <= it->second);
    }
  }
}

TEST_CASE("parse errors carry a kind and a position") {
  try {
    load_problem_text("thf(a_t, type, a: $tType).\nthf(c_d, type c: a).\n");
    FAIL("expected an error");
  } catch (const ParseError& e) {
    CHECK(e.kind() == ParseError::Kind::Syntax);
    CHECK(e.line() == 2);
    CHECK(e.col() == 15);
  }
  CHECK(parse_kind(std::string(kHeader) + "thf(r, axiom, ((k @ c) = c)).") == ParseError::Kind::UnknownSymbol);
  CHECK(parse_kind(std::string(kHeader) + "thf(r, axiom, ((f @ f) = c)).") == ParseError::Kind::TypeMismatch);
  CHECK(parse_kind(std::string(kHeader) + "thf(r, axiom, ((f @ c) = f)).") == ParseError::Kind::TypeMismatch);
  CHECK(parse_kind(std::string(kHeader) + "thf(r, axiom, ((f @ c) != c)).") == ParseError::Kind::NonEquality);
  CHECK(parse_kind(std::string(kHeader) + "thf(r, axiom, ~ ((f @ c) = c)).") == ParseError::Kind::NonEquality);
  CHECK(parse_kind(std::string(kHeader) + "thf(r, axiom, (f @ c)).") == ParseError::Kind::NonEquality);
  CHECK(parse_kind(std::string(kHeader) + "thf(r, axiom, (((f @ c) = c) | ((g @ c @ c) = c))).") ==
        ParseError::Kind::NonUnit);
  CHECK(parse_kind(std::string(kHeader) + "thf(h_d, type, h: b > a).") == ParseError::Kind::UndeclaredType);
  CHECK(parse_kind(std::string(kHeader) + "thf(r, axiom, ![X:$i]: ((f @ c) = c)).") ==
        ParseError::Kind::UndeclaredType);
  CHECK(parse_kind(std::string(kHeader) + "thf(r, axiom, ((f @ c) = c)).\nthf(r, axiom, ((g @ c @ c) = c)).") ==
        ParseError::Kind::Duplicate);
  CHECK(parse_kind(std::string(kHeader) + "thf(r, axiom, ((f @ Y) = c)).") == ParseError::Kind::UnknownSymbol);
  CHECK(parse_kind(std::string(kHeader) + "thf(r, conjecture, ((f @ c) = c)).") == ParseError::Kind::Unsupported);
}

TEST_CASE("rule validation") {
  // variable-headed left-hand side
  std::string v = std::string(kHeader) + "thf(r, axiom, ![X:a]: (X = c)).";
  CHECK_THROWS_AS(load_problem_text(v), ValidationError);
  std::string v2 = std::string(kHeader) + "thf(r, axiom, ![F:a > a]: ((F @ c) = c)).";
  CHECK_THROWS_AS(load_problem_text(v2), ValidationError);
  // extra variable on the right
  std::string extra = std::string(kHeader) + "thf(r, axiom, ![X:a, G:a]: ((f @ X) = G)).";
  try {
    load_problem_text(extra);
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    REQUIRE(e.issues().size() == 1);
    CHECK(e.issues()[0].find("only on the right") != std::string::npos);
  }
  // non-normal side, reported with its normal form (g gets arity 1 from the right)
  std::string eta = std::string(kHeader) +
                    "thf(h_d, type, h: (a > a) > a).\n"
                    "thf(r, axiom, ((h @ (^[X:a]: (g @ c @ X))) = (h @ (g @ c)))).";
  try {
    load_problem_text(eta);
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    REQUIRE(e.issues().size() == 1);
    CHECK(e.issues()[0].find("normal form is h(g(c))") != std::string::npos);
  }
  // a lambda over a Fun node is fine once g gets arity 2
  std::string ok = std::string(kHeader) +
                   "thf(h_d, type, h: (a > a) > a).\n"
                   "thf(r, axiom, ((h @ (^[X:a]: (g @ c @ X))) = (g @ c @ c))).";
  CHECK_NOTHROW(load_problem_text(ok));
}

TEST_CASE("printing and re-parsing gives the same problem") {
  for (const char* name : {"diff.p", "nnf.p", "mapinc.p", "example1.p", "selfembed.p"}) {
    Problem p = load_problem_file(problem_path(name));
    Problem q = load_problem_text(print_problem_thf(p));
    REQUIRE(p.rules.size() == q.rules.size());
    CHECK(p.base_types == q.base_types);
    REQUIRE(p.symbols.size() == q.symbols.size());
    for (std::size_t i = 0; i < p.symbols.size(); ++i) {
      CHECK(p.symbols[i]->name == q.symbols[i]->name);
      CHECK(p.symbols[i]->type == q.symbols[i]->type);
      CHECK(p.symbols[i]->arity == q.symbols[i]->arity);
    }
    for (std::size_t i = 0; i < p.rules.size(); ++i) {
      CHECK(p.rules[i].name == q.rules[i].name);
      CHECK(p.rules[i].lhs == q.rules[i].lhs);
      CHECK(p.rules[i].rhs == q.rules[i].rhs);
    }
  }
}

TEST_CASE("binder shadowing resolves to the innermost binder") {
  std::string text = std::string(kHeader) +
                     "thf(h_d, type, h: (a > a) > a).\n"
                     "thf(r, axiom, ![X:a]: ((g @ X @ (h @ (^[X:a]: (f @ X)))) = X)).";
  Problem p = load_problem_text(text);
  CHECK(to_string(p.rules[0].lhs) == "g(X, h(λX1.f(X1)))");
}

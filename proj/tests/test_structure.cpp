#include "doctest.h"

#include <algorithm>
#include <optional>
#include <random>

#include "hoterm/structure.hpp"
#include "hoterm/thf.hpp"
#include "named.hpp"

using namespace hoterm;

namespace {

std::string problem_path(const std::string& name) { return std::string(HOTERM_SOURCE_DIR) + "/problems/" + name; }

Term V(const std::string& n, Type t) { return Term::var(Var{n, 0, std::move(t)}); }

bool contains(const std::vector<Term>& v, const Term& t) { return std::find(v.begin(), v.end(), t) != v.end(); }

// Every App and Lam node inside t passes the sufficient check.
bool hereditarily_nonversatile(const Term& t) {
  switch (t.kind()) {
    case Term::Kind::Fun:
      return std::all_of(t.args().begin(), t.args().end(), hereditarily_nonversatile);
    case Term::Kind::App:
      return is_nonversatile_unchecked(t) && hereditarily_nonversatile(t.fun()) && hereditarily_nonversatile(t.arg());
    case Term::Kind::Lam:
      return is_nonversatile_unchecked(t) && hereditarily_nonversatile(t.body());
    default:
      return true;
  }
}

// Follow a path of (symbol, argument index) steps through spines.
std::optional<Term> follow(const Term& s, const std::vector<AccStep>& path) {
  Term cur = s;
  for (const auto& st : path) {
    Spine sp = spine(cur);
    if (!sp.head.is_fun() || sp.head.symbol() != st.f || !cur.type().is_base()) return std::nullopt;
    std::vector<Term> all = sp.head.args();
    all.insert(all.end(), sp.args.begin(), sp.args.end());
    if (st.index < 1 || st.index > static_cast<int>(all.size())) return std::nullopt;
    cur = all[st.index - 1];
  }
  return cur;
}

struct Sig {
  Type a = Type::base("a");
  Type b = Type::base("b");
  Type aa = Type::arrow(a, a);
  Type ba = Type::arrow(b, a);
  Symbol c = make_symbol("c", a, 0);
  Symbol d = make_symbol("d", b, 0);
  Symbol f = make_symbol("f", Type::arrows({a, b}, a), 2);
  Symbol g = make_symbol("g", Type::arrow(ba, a), 1);
  Symbol h = make_symbol("h", aa, 0);
  Symbol k = make_symbol("k", Type::arrows({b, a}, a), 1);
  Symbol m = make_symbol("m", Type::arrows({a, a}, b), 2);

  named::Gen gen(std::mt19937& rng) {
    return named::Gen{rng,
                      {c, d, f, g, h, k, m},
                      {{"x", a}, {"y", b}, {"F", aa}, {"H", ba}, {"x2", a}, {"y2", b}}};
  }
};

Substitution random_subst(const Term& s, named::Gen& gen, bool restricted) {
  Substitution sigma;
  for (const auto& x : free_vars(s)) {
    if (gen.pick(3) == 0) continue;
    for (int tries = 0; tries < 50; ++tries) {
      Term v = beta_eta_normalize(named::to_db(gen.gen(x.type, 3)));
      if (!restricted || hereditarily_nonversatile(v)) {
        sigma[x] = v;
        break;
      }
    }
  }
  return sigma;
}

}  // namespace

TEST_CASE("nonversatility verdicts on the standard examples") {
  Type a = Type::base("a");
  Type aa = Type::arrow(a, a);
  Symbol c = make_symbol("c", aa, 0);
  Symbol f = make_symbol("f", Type::arrow(a, a), 1);
  Symbol f2 = make_symbol("f", Type::arrows({a, a}, a), 1);
  Term x = V("x", a);
  Term y = V("y", aa);
  CHECK(is_nonversatile(Term::app(Term::fun(c, {}), x)));
  CHECK_FALSE(is_nonversatile(Term::app(y, x)));
  Var xv{"x", 0, a};
  CHECK(is_nonversatile(Term::lambda(xv, Term::fun(f, {Term::app(y, x)}))));
  CHECK_FALSE(is_nonversatile(Term::lambda(xv, Term::app(Term::fun(f2, {Term::app(y, x)}), x))));
  CHECK_FALSE(is_nonversatile(V("P", a)));
  CHECK(is_nonversatile(Term::fun(make_symbol("e", a, 0), {})));
  CHECK_THROWS_AS(is_nonversatile(Term::app(Term::lam(a, Term::bound(0, a)), x)), TypeError);
}

TEST_CASE("nonversatility of abstractions") {
  Type a = Type::base("a");
  Type aa = Type::arrow(a, a);
  Symbol f = make_symbol("f", Type::arrows({a, a}, a), 1);
  Symbol h = make_symbol("h", Type::arrow(a, a), 1);
  Var xv{"x", 0, a};
  Term x = Term::var(xv);
  Term y = V("y", aa);
  Term z = V("z", a);
  // lambda x. f(z) z: the body ignores x and stays an application
  CHECK(is_nonversatile(Term::lambda(xv, Term::app(Term::fun(f, {z}), z))));
  CHECK_FALSE(is_nonversatile(Term::lambda(xv, Term::app(y, z))));
  // lambda x. x and lambda x. z are fine
  CHECK(is_nonversatile(Term::lambda(xv, x)));
  CHECK(is_nonversatile(Term::lambda(xv, z)));
  // lambda x. f(h(x)) (h(z) x): the argument is an application with a function head
  Term u = Term::app(Term::fun(f, {Term::fun(h, {x})}), Term::fun(h, {z}));
  CHECK(is_nonversatile(Term::lambda(xv, u)));
  // lambda x. f(x) (y z): the argument application is versatile
  Term u2 = Term::app(Term::fun(f, {x}), Term::app(y, z));
  CHECK_FALSE(is_nonversatile(Term::lambda(xv, u2)));
  // alpha-equivalent abstractions get the same verdict
  Term l1 = Term::lam(a, Term::fun(h, {Term::bound(0, a)}), "p");
  Term l2 = Term::lam(a, Term::fun(h, {Term::bound(0, a)}), "q");
  CHECK(l1 == l2);
  CHECK(is_nonversatile(l1) == is_nonversatile(l2));
}

TEST_CASE("basic subterms of a double negation") {
  Problem p = load_problem_file(problem_path("nnf.p"));
  Symbol no = p.find_symbol("not");
  Term P = V("P", Type::base("f"));
  Term s = Term::fun(no, {Term::fun(no, {P})});
  OrderParams o = OrderParams::defaults(p);
  CHECK(bsubt_targets(s, o).empty());
  o.basic["f"] = true;
  auto got = bsubt_targets(s, o);
  CHECK(got.size() == 2);
  CHECK(contains(got, Term::fun(no, {P})));
  CHECK(contains(got, P));
  CHECK_THROWS_AS(bsubt_targets(Term::app(V("Y", Type::arrow(Type::base("f"), Type::base("f"))), P), o),
                  TypeError);
}

TEST_CASE("basic subterms never let a bound variable escape") {
  Type a = Type::base("a");
  Symbol f = make_symbol("f", Type::arrow(a, a), 1);
  Symbol g = make_symbol("g", Type::arrow(Type::arrow(a, a), a), 1);
  Symbol c = make_symbol("c", a, 0);
  // g(lambda x. f(x)) and g(lambda x. f(c))
  Term s1 = Term::fun(g, {Term::lam(a, Term::fun(f, {Term::bound(0, a)}))});
  Term s2 = Term::fun(g, {Term::lam(a, Term::fun(f, {Term::fun(c, {})}))});
  auto c1 = bsubt_candidates(s1);
  CHECK(c1.empty());
  auto c2 = bsubt_candidates(s2);
  CHECK(c2.size() == 2);
  CHECK(contains(c2, Term::fun(f, {Term::fun(c, {})})));
  CHECK(contains(c2, Term::fun(c, {})));
}

TEST_CASE("basic subterms stop at versatile intermediate nodes") {
  Type a = Type::base("a");
  Type aa = Type::arrow(a, a);
  Symbol f = make_symbol("f", Type::arrow(a, a), 1);
  Symbol c = make_symbol("c", a, 0);
  Term cc = Term::fun(c, {});
  Term Y = V("Y", aa);
  // f(Y c): the application Y c is versatile, so c is not reached
  Term s = Term::fun(f, {Term::app(Y, cc)});
  auto nv = bsubt_candidates(s);
  CHECK(nv.size() == 1);
  CHECK(nv[0] == Term::app(Y, cc));
  auto plain = bsubt_candidates(s, false);
  CHECK(plain.size() == 2);
  CHECK(contains(plain, cc));
}

TEST_CASE("accessible subterms") {
  Problem p = load_problem_file(problem_path("nnf.p"));
  Symbol all = p.find_symbol("forall");
  Symbol no = p.find_symbol("not");
  Type t = Type::base("t"), fb = Type::base("f");
  Term R = V("R", Type::arrow(t, fb));
  Term s = Term::fun(all, {R});
  OrderParams o = OrderParams::defaults(p);
  CHECK(asubt_targets(s, o).empty());
  o.acc["forall"] = {1};
  auto got = asubt_targets(s, o);
  REQUIRE(got.size() == 1);
  CHECK(got[0] == R);
  // head-variable terms have no accessible subterms
  Term x = V("x", t);
  CHECK(asubt_candidates(Term::app(R, x)).empty());
  // accessibility has to hold along the whole path
  Term nn = Term::fun(no, {Term::fun(all, {R})});
  CHECK(asubt_targets(nn, o).empty());
  o.acc["not"] = {1};
  auto deep = asubt_targets(nn, o);
  CHECK(deep.size() == 2);
  CHECK(contains(deep, R));
}

TEST_CASE("accessible subterms include arguments beyond the arity") {
  Type a = Type::base("a"), b = Type::base("b");
  Symbol f = make_symbol("f", Type::arrows({a, b}, a), 1);
  Term x = V("x", a), y = V("y", b);
  Term s = Term::app(Term::fun(f, {x}), y);
  auto cands = asubt_candidates(s);
  REQUIRE(cands.size() == 2);
  CHECK(cands[1].target == y);
  CHECK(cands[1].path[0].index == 2);
  // partially applied: type is not base
  CHECK(asubt_candidates(Term::fun(f, {x})).empty());
}

TEST_CASE("structurally smaller terms") {
  Problem p = load_problem_file(problem_path("nnf.p"));
  Symbol all = p.find_symbol("forall");
  Type t = Type::base("t"), fb = Type::base("f");
  Term R = V("R", Type::arrow(t, fb));
  Var xv{"x", 0, t};
  Term x = Term::var(xv);
  Term s = Term::fun(all, {R});
  OrderParams o = OrderParams::defaults(p);
  o.levels.set("f", 1);
  o.acc["forall"] = {1};
  CHECK(structsm(s, Term::app(R, x), {xv}, o));
  // y is not in X
  CHECK_FALSE(structsm(s, Term::app(R, V("y", t)), {xv}, o));
  // not accessible without the parameter
  OrderParams none = o;
  none.acc.clear();
  CHECK_FALSE(structsm(s, Term::app(R, x), {xv}, none));
  // s does not reach an unrelated term
  CHECK_FALSE(structsm(s, Term::app(V("Q", Type::arrow(t, fb)), x), {xv}, o));
}

TEST_CASE("the structural step needs variables whose type avoids the result base") {
  Type a = Type::base("a");
  Type aa = Type::arrow(a, a);
  Symbol lim = make_symbol("lim", Type::arrow(aa, a), 1);
  Var xv{"x", 0, a};
  Term F = V("F", aa);
  Term s = Term::fun(lim, {F});
  Problem p;
  p.base_types = {"a"};
  p.symbols = {lim};
  OrderParams o = OrderParams::defaults(p);
  o.acc["lim"] = {1};
  // Pos_a(a) is nonempty, so F x is not structurally smaller
  CHECK_FALSE(structsm(s, Term::app(F, Term::var(xv)), {xv}, o));
  CHECK(structsm_candidates(s, {xv}).empty());
}

TEST_CASE("empty spines in the structural step") {
  Type a = Type::base("a");
  Symbol suc = make_symbol("suc", Type::arrow(a, a), 1);
  Term n = V("n", a);
  Term s = Term::fun(suc, {n});
  Problem p;
  p.base_types = {"a"};
  p.symbols = {suc};
  OrderParams o = OrderParams::defaults(p);
  o.acc["suc"] = {1};
  CHECK(structsm(s, n, {}, o) == structsm_allows_empty_spine());
}

TEST_CASE("parameter validation") {
  Problem nnf = load_problem_file(problem_path("nnf.p"));
  OrderParams o = OrderParams::defaults(nnf);
  CHECK(validate_params(nnf, o).empty());
  o.levels.set("f", 1);
  o.prec["not"] = 1;
  o.acc["forall"] = {1};
  o.acc["exists"] = {1};
  CHECK(validate_params(nnf, o).empty());
  CHECK(pos_of("f", Type::arrow(Type::base("t"), Type::base("f"))) == PositionSet{"2"});
  // a basic result base with a higher-order accessible argument is rejected
  OrderParams ob = o;
  ob.basic["f"] = true;
  ob.basic["t"] = true;
  CHECK_FALSE(validate_params(nnf, ob).empty());
  // equal levels: f no longer dominates t
  OrderParams eq = o;
  eq.levels.set("f", 0);
  CHECK_FALSE(validate_params(nnf, eq).empty());
  // status coherence
  OrderParams st = o;
  st.status["and"] = Status::Lex;
  CHECK_FALSE(validate_params(nnf, st).empty());
  st.prec["and"] = 5;
  st.prec["not"] = 6;
  CHECK(validate_params(nnf, st).empty());
  // small symbols may not sit above big ones
  OrderParams sm = o;
  sm.big["not"] = false;
  CHECK_FALSE(validate_params(nnf, sm).empty());

  Type a = Type::base("a");
  Problem lam;
  lam.base_types = {"a"};
  lam.symbols = {make_symbol("abs", Type::arrow(Type::arrow(a, a), a), 1)};
  OrderParams ol = OrderParams::defaults(lam);
  CHECK(validate_params(lam, ol).empty());
  ol.acc["abs"] = {1};
  auto issues = validate_params(lam, ol);
  REQUIRE(issues.size() == 1);
  CHECK(issues[0].find("negatively") != std::string::npos);
  CHECK(pos_of("a", Type::arrow(a, a)) == PositionSet{"1", "2"});
  CHECK(pos_plus(Type::arrow(a, a)) == PositionSet{"2"});
  ol.acc["abs"] = {2};
  CHECK_FALSE(validate_params(lam, ol).empty());
}

TEST_CASE("small-symbol constraints") {
  Problem m = load_problem_file(problem_path("mapinc.p"));
  OrderParams o = OrderParams::defaults(m);
  o.levels.set("a", 1);
  for (const auto& [f, pr] : std::map<std::string, int>{
           {"inc", 4}, {"map", 3}, {"cons", 2}, {"nil", 2}, {"plus", 2}, {"zero", 1}, {"s", 0}})
    o.prec[f] = pr;
  o.big["s"] = false;
  CHECK(validate_params(m, o).empty());
  // a small symbol must be strictly below every big one
  OrderParams bad = o;
  bad.prec["zero"] = 0;
  CHECK_FALSE(validate_params(m, bad).empty());
  // a small map would have to dominate its functional argument
  OrderParams c = o;
  c.levels.set("a", 0);
  c.levels.set("b", 1);
  c.big["map"] = false;
  c.prec["map"] = -1;
  auto issues = validate_params(m, c);
  CHECK(std::any_of(issues.begin(), issues.end(),
                    [](const std::string& s) { return s.find("does not dominate") != std::string::npos; }));
}

TEST_CASE("parameter files") {
  Problem nnf = load_problem_file(problem_path("nnf.p"));
  OrderParams o = parse_params(
      "% comment\n"
      "level f 1\nlevel t 0\n"
      "prec not 1\n"
      "status and lex\nstatus or lex\n"
      "big or false\n"
      "acc forall 1\nacc exists 1, \n"
      "basic t true\n",
      nnf);
  CHECK(o.levels.level("f") == 1);
  CHECK(o.prec_of("not") == 1);
  CHECK(o.prec_of("and") == 0);
  CHECK(o.status_of("and") == Status::Lex);
  CHECK(o.status_of("not") == Status::Mul);
  CHECK_FALSE(o.is_big("or"));
  CHECK(o.acc_of("exists") == std::set<int>{1});
  CHECK(o.is_basic("t"));
  CHECK_FALSE(o.is_basic("f"));
  OrderParams back = parse_params(format_params(o, nnf), nnf);
  CHECK(format_params(back, nnf) == format_params(o, nnf));
  CHECK_THROWS_AS(parse_params("prec nope 1\n", nnf), ParamsError);
  CHECK_THROWS_AS(parse_params("level q 1\n", nnf), ParamsError);
  CHECK_THROWS_AS(parse_params("status not both\n", nnf), ParamsError);
  CHECK_THROWS_AS(parse_params("big not maybe\n", nnf), ParamsError);
  CHECK_THROWS_AS(parse_params("prec not x1\n", nnf), ParamsError);
  CHECK_THROWS_AS(parse_params("frobnicate\n", nnf), ParamsError);
  CHECK_THROWS_AS(load_params_file("/nonexistent/params", nnf), ParamsError);
}

TEST_CASE("subterm relations shrink terms and survive substitution") {
  Sig S;
  std::mt19937 rng(23);
  auto gen = S.gen(rng);
  gen.redex_weight = 0;
  int b_pairs = 0, acc_pairs = 0, sm_pairs = 0;
  for (int n = 0; n < 600; ++n) {
    Term s = beta_eta_normalize(named::to_db(gen.gen(n % 5 == 0 ? S.b : S.a, 4)));
    if (!is_nonversatile(s)) continue;
    Substitution sigma = random_subst(s, gen, true);
    Term ss = beta_eta_normalize(substitute(s, sigma));
    CHECK(is_nonversatile(ss));
    for (const auto& t : bsubt_candidates(s)) {
      CHECK(t.size() < s.size());
      Term ts = beta_eta_normalize(substitute(t, sigma));
      if (!contains(bsubt_candidates(ss), ts)) FAIL_CHECK(s << " |>b " << t << " lost under substitution");
      ++b_pairs;
    }
    for (const auto& c : asubt_candidates(s)) {
      CHECK(c.target.size() < s.size());
      auto again = follow(ss, c.path);
      REQUIRE(again.has_value());
      CHECK(*again == beta_eta_normalize(substitute(c.target, sigma)));
      ++acc_pairs;
    }
    // structural step with X = the free variables of base type b, kept away from sigma
    VarSet X;
    for (const auto& x : free_vars(s))
      if (x.type == S.b) X.insert(x);
    X.insert(Var{"y9", 0, S.b});
    Substitution away;
    for (const auto& [x, v] : sigma)
      if (!X.count(x)) away[x] = v;
    Term sa = beta_eta_normalize(substitute(s, away));
    for (const auto& c : structsm_candidates(s, X)) {
      if (!is_beta_eta_normal(c.witness) || !is_nonversatile(c.witness)) continue;
      Term ta = beta_eta_normalize(substitute(c.witness, away));
      bool found = false;
      for (const auto& c2 : structsm_candidates(sa, X)) found |= c2.witness == ta && c2.xs == c.xs;
      CHECK(found);
      ++sm_pairs;
    }
  }
  CHECK(b_pairs > 200);
  CHECK(acc_pairs > 200);
  CHECK(sm_pairs > 20);
  MESSAGE("pairs: b " << b_pairs << ", acc " << acc_pairs << ", structural " << sm_pairs);
}

TEST_CASE("the sufficient check is not closed under arbitrary substitutions") {
  // lambda x. f(k(x, y)) x passes, but instantiating y by an application with a
  // variable head produces lambda x. f(k(x, z w)) x, which the check rejects.
  Type a = Type::base("a");
  Type aa = Type::arrow(a, a);
  Symbol f = make_symbol("f", Type::arrows({a, a}, a), 1);
  Symbol k = make_symbol("k", Type::arrows({a, a}, a), 2);
  Var xv{"x", 0, a};
  Term y = V("y", a);
  Term s = Term::lambda(xv, Term::app(Term::fun(f, {Term::fun(k, {Term::var(xv), y})}), Term::var(xv)));
  CHECK(is_nonversatile(s));
  Term zw = Term::app(V("z", aa), V("w", a));
  Term ss = beta_eta_normalize(substitute(s, {{Var{"y", 0, a}, zw}}));
  CHECK_FALSE(is_nonversatile(ss));
}

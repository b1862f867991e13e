#include "hoterm/smt.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <chrono>
#include <cstring>
#include <functional>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "hoterm/order.hpp"

namespace hoterm {

// ---------------------------------------------------------------------------
// atoms

namespace {

std::string sanitize(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '|' || c == '\\') {
      out += c == '|' ? "_bar_" : "_bsl_";
    } else {
      out += c;
    }
  }
  return out;
}

bool bare_symbol(const std::string& s) {
  if (s.empty() || std::isdigit(static_cast<unsigned char>(s[0]))) return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

std::string smt_symbol(const std::string& s) { return bare_symbol(s) ? s : "|" + s + "|"; }

}  // namespace

std::string atom_name(AtomKind kind, const std::string& subject, int index) {
  std::string s = sanitize(subject);
  switch (kind) {
    case AtomKind::Prec:
      return "prec_" + s;
    case AtomKind::Level:
      return "level_" + s;
    case AtomKind::Mul:
      return "mul_" + s;
    case AtomKind::Big:
      return "big_" + s;
    case AtomKind::Acc:
      return "acc_" + s + "_" + std::to_string(index);
    case AtomKind::Basic:
      return "basic_" + s;
  }
  return s;
}

std::vector<Atom> problem_atoms(const Problem& p) {
  std::vector<Atom> out;
  auto add = [&](AtomKind k, const std::string& subj, int i = 0) { out.push_back({k, subj, i, atom_name(k, subj, i)}); };
  for (const auto& b : p.base_types) add(AtomKind::Level, b);
  for (const auto& f : p.symbols) add(AtomKind::Prec, f->name);
  for (const auto& b : p.base_types) add(AtomKind::Basic, b);
  for (const auto& f : p.symbols) {
    add(AtomKind::Mul, f->name);
    add(AtomKind::Big, f->name);
    int n = static_cast<int>(f->type.arg_types().size());
    for (int i = 1; i <= n; ++i) add(AtomKind::Acc, f->name, i);
  }
  return out;
}

// ---------------------------------------------------------------------------
// formula pool

FormulaPool::FormulaPool() {
  nodes_.push_back({Op::True, 0, 0, {}});
  nodes_.push_back({Op::False, 0, 0, {}});
}

FormulaPool::F FormulaPool::intern(Node n) {
  auto key = std::make_tuple(static_cast<int>(n.op), n.a, n.b, n.kids);
  auto it = index_.find(key);
  if (it != index_.end()) return it->second;
  F id = static_cast<F>(nodes_.size());
  nodes_.push_back(std::move(n));
  index_.emplace(std::move(key), id);
  return id;
}

FormulaPool::F FormulaPool::var(int atom) { return intern({Op::Var, atom, 0, {}}); }
FormulaPool::F FormulaPool::gt(int x, int y) { return x == y ? falsity() : intern({Op::Gt, x, y, {}}); }
FormulaPool::F FormulaPool::ge(int x, int y) { return x == y ? truth() : intern({Op::Ge, x, y, {}}); }
FormulaPool::F FormulaPool::eq(int x, int y) {
  if (x == y) return truth();
  if (x > y) std::swap(x, y);
  return intern({Op::Eq, x, y, {}});
}
FormulaPool::F FormulaPool::def(int id) { return intern({Op::Def, id, 0, {}}); }

FormulaPool::F FormulaPool::neg(F f) {
  if (f == truth()) return falsity();
  if (f == falsity()) return truth();
  if (node(f).op == Op::Not) return node(f).kids[0];
  return intern({Op::Not, 0, 0, {f}});
}

FormulaPool::F FormulaPool::conj(std::vector<F> fs) {
  std::vector<F> kids;
  std::set<F> seen;
  for (F f : fs) {
    if (f == falsity()) return falsity();
    if (f == truth()) continue;
    const auto& n = node(f);
    if (n.op == Op::And) {
      for (F k : n.kids)
        if (seen.insert(k).second) kids.push_back(k);
    } else if (seen.insert(f).second) {
      kids.push_back(f);
    }
  }
  if (kids.empty()) return truth();
  if (kids.size() == 1) return kids[0];
  return intern({Op::And, 0, 0, std::move(kids)});
}

FormulaPool::F FormulaPool::disj(std::vector<F> fs) {
  std::vector<F> kids;
  std::set<F> seen;
  for (F f : fs) {
    if (f == truth()) return truth();
    if (f == falsity()) continue;
    const auto& n = node(f);
    if (n.op == Op::Or) {
      for (F k : n.kids)
        if (seen.insert(k).second) kids.push_back(k);
    } else if (seen.insert(f).second) {
      kids.push_back(f);
    }
  }
  if (kids.empty()) return falsity();
  if (kids.size() == 1) return kids[0];
  return intern({Op::Or, 0, 0, std::move(kids)});
}

// ---------------------------------------------------------------------------
// evaluation

namespace {

long long atom_value(const Atom& a, const OrderParams& o) {
  switch (a.kind) {
    case AtomKind::Prec:
      return o.prec_of(a.subject);
    case AtomKind::Level:
      return o.levels.level(a.subject);
    case AtomKind::Mul:
      return o.status_of(a.subject) == Status::Mul;
    case AtomKind::Big:
      return o.is_big(a.subject);
    case AtomKind::Acc:
      return o.acc_of(a.subject).count(a.index) != 0;
    case AtomKind::Basic:
      return o.is_basic(a.subject);
  }
  return 0;
}

struct Evaluator {
  const Encoding& e;
  const OrderParams& o;
  std::vector<long long> values;
  std::vector<signed char> def_cache;

  Evaluator(const Encoding& e, const OrderParams& o) : e(e), o(o), def_cache(e.defs.size(), -1) {
    for (const auto& a : e.atoms) values.push_back(atom_value(a, o));
  }

  bool eval(FormulaPool::F f) {
    using Op = FormulaPool::Op;
    const auto& n = e.pool.node(f);
    switch (n.op) {
      case Op::True:
        return true;
      case Op::False:
        return false;
      case Op::Var:
        return values[static_cast<std::size_t>(n.a)] != 0;
      case Op::Gt:
        return values[static_cast<std::size_t>(n.a)] > values[static_cast<std::size_t>(n.b)];
      case Op::Ge:
        return values[static_cast<std::size_t>(n.a)] >= values[static_cast<std::size_t>(n.b)];
      case Op::Eq:
        return values[static_cast<std::size_t>(n.a)] == values[static_cast<std::size_t>(n.b)];
      case Op::Not:
        return !eval(n.kids[0]);
      case Op::And:
        return std::all_of(n.kids.begin(), n.kids.end(), [&](FormulaPool::F k) { return eval(k); });
      case Op::Or:
        return std::any_of(n.kids.begin(), n.kids.end(), [&](FormulaPool::F k) { return eval(k); });
      case Op::Def: {
        auto& c = def_cache[static_cast<std::size_t>(n.a)];
        if (c < 0) c = eval(e.defs[static_cast<std::size_t>(n.a)]) ? 1 : 0;
        return c == 1;
      }
    }
    return false;
  }
};

}  // namespace

bool Encoding::evaluate(FormulaPool::F f, const OrderParams& params) const { return Evaluator(*this, params).eval(f); }

bool Encoding::global_holds(const OrderParams& params) const {
  Evaluator ev(*this, params);
  return std::all_of(global.begin(), global.end(), [&](FormulaPool::F f) { return ev.eval(f); });
}

bool Encoding::rule_holds(std::size_t i, const OrderParams& params) const { return evaluate(roots.at(i), params); }

// ---------------------------------------------------------------------------
// encoder

namespace {

using F = FormulaPool::F;

struct JKey {
  Term s, t;
  VarSet X;
  friend bool operator==(const JKey& a, const JKey& b) { return a.s == b.s && a.t == b.t && a.X == b.X; }
};
struct JKeyHash {
  std::size_t operator()(const JKey& k) const {
    std::size_t h = hash_mix(k.s.hash(), k.t.hash());
    for (const auto& x : k.X) h = hash_mix(h, x.hash());
    return h;
  }
};

bool is_x(const Term& t, const VarSet& X) { return t.is_var() && X.count(t.var()); }

VarSet with(VarSet X, const Var& z) {
  X.insert(z);
  return X;
}

// Symbolic counterpart of OrderEngine: every judgment becomes a formula over the parameter atoms
// that holds exactly for the parameters under which the engine succeeds.
class Encoder {
 public:
  Encoder(const Problem& p, EncodeOptions opts, Encoding& out) : p_(p), opts_(opts), e_(out) {
    e_.atoms = problem_atoms(p);
    for (std::size_t i = 0; i < e_.atoms.size(); ++i) {
      const auto& a = e_.atoms[i];
      atom_ids_[{a.kind, a.subject, a.index}] = static_cast<int>(i);
    }
  }

  void run() {
    global();
    for (const auto& r : p_.rules) {
      if (!is_beta_eta_normal(r.lhs)) throw TypeError("left-hand side is not beta-eta normal: " + to_string(r.lhs));
      if (!is_beta_eta_normal(r.rhs)) throw TypeError("right-hand side is not beta-eta normal: " + to_string(r.rhs));
      e_.roots.push_back(strict(r.lhs, r.rhs, {}));
      e_.rule_names.push_back(r.name);
    }
  }

 private:
  FormulaPool& pool() { return e_.pool; }
  F yes() { return pool().truth(); }
  F no() { return pool().falsity(); }

  int atom(AtomKind k, const std::string& subj, int i = 0) {
    auto it = atom_ids_.find({k, subj, i});
    if (it == atom_ids_.end()) throw std::logic_error("no parameter variable " + atom_name(k, subj, i));
    return it->second;
  }
  F bvar(AtomKind k, const std::string& subj, int i = 0) { return pool().var(atom(k, subj, i)); }
  F big(const std::string& f) { return bvar(AtomKind::Big, f); }
  F prec_gt(const std::string& f, const std::string& g) {
    return pool().gt(atom(AtomKind::Prec, f), atom(AtomKind::Prec, g));
  }
  F prec_eq(const std::string& f, const std::string& g) {
    return pool().eq(atom(AtomKind::Prec, f), atom(AtomKind::Prec, g));
  }
  F level_gt(const std::string& a, const std::string& b) {
    return pool().gt(atom(AtomKind::Level, a), atom(AtomKind::Level, b));
  }

  void check_budget() {
    if (opts_.node_budget && pool().size() > opts_.node_budget)
      throw EncodingTooLarge("encoding exceeds " + std::to_string(opts_.node_budget) + " formula nodes");
  }

  // --- types

  F type_gt(const Type& T, const Type& U) {
    auto key = std::make_pair(T, U);
    if (auto it = tgt_.find(key); it != tgt_.end()) return it->second;
    F r;
    if (T.is_base()) {
      r = U.is_base() ? level_gt(T.name(), U.name()) : no();
    } else {
      F alt = (U.is_arrow() && U.domain() == T.domain()) ? type_gt(T.codomain(), U.codomain()) : no();
      r = pool().disj(type_ge(T.codomain(), U), alt);
    }
    tgt_.emplace(key, r);
    return r;
  }
  F type_ge(const Type& T, const Type& U) { return T == U ? yes() : type_gt(T, U); }

  F type_gtdot(const Type& T, const Type& U) {
    F r = type_gt(T, U);
    if (T.is_base()) return r;
    return pool().disj({r, type_geqdot(T.domain(), U), type_geqdot(T.codomain(), U)});
  }
  F type_geqdot(const Type& T, const Type& U) { return T == U ? yes() : type_gtdot(T, U); }

  F base_dominates(const std::string& a, const Type& T) {
    if (T.is_base()) return T.name() == a ? yes() : level_gt(a, T.name());
    return pool().conj(base_dominates(a, T.domain()), base_dominates(a, T.codomain()));
  }

  // --- global constraints

  void global() {
    auto& g = e_.global;
    auto& P = pool();
    const auto& syms = p_.symbols;
    for (const auto& f : syms)
      for (const auto& h : syms) {
        if (f->id >= h->id) continue;
        F mf = bvar(AtomKind::Mul, f->name), mh = bvar(AtomKind::Mul, h->name);
        g.push_back(P.disj({P.neg(prec_eq(f->name, h->name)), P.conj(mf, mh), P.conj(P.neg(mf), P.neg(mh))}));
      }
    for (const auto& f : syms)
      for (const auto& h : syms) {
        if (f == h) continue;
        F ge = P.ge(atom(AtomKind::Prec, f->name), atom(AtomKind::Prec, h->name));
        g.push_back(P.disj({P.neg(ge), P.neg(big(h->name)), big(f->name)}));
      }
    for (const auto& f : syms) {
      auto args = f->type.arg_types();
      const std::string& a = f->type.result_base().name();
      for (int i = 1; i <= static_cast<int>(args.size()); ++i) {
        const Type& Ti = args[static_cast<std::size_t>(i - 1)];
        auto of = pos_of(a, Ti);
        auto plus = pos_plus(Ti);
        F pos_ok = std::includes(plus.begin(), plus.end(), of.begin(), of.end()) ? yes() : no();
        g.push_back(P.disj(P.neg(bvar(AtomKind::Acc, f->name, i)), P.conj(base_dominates(a, Ti), pos_ok)));
      }
    }
    for (const auto& a : p_.base_types) {
      std::vector<F> conds;
      for (const auto& b : p_.base_types)
        if (b != a) conds.push_back(P.disj(P.neg(level_gt(a, b)), bvar(AtomKind::Basic, b)));
      for (const auto& f : syms) {
        if (f->type.result_base().name() != a) continue;
        auto args = f->type.arg_types();
        for (int i = 1; i <= static_cast<int>(args.size()); ++i) {
          const Type& Ti = args[static_cast<std::size_t>(i - 1)];
          F ok = Ti == Type::base(a) ? yes() : Ti.is_base() ? bvar(AtomKind::Basic, Ti.name()) : no();
          conds.push_back(P.disj(P.neg(bvar(AtomKind::Acc, f->name, i)), ok));
        }
      }
      g.push_back(P.disj(P.neg(bvar(AtomKind::Basic, a)), P.conj(conds)));
    }
    SposAnalysis spos;
    for (const auto& f : syms) {
      auto args = f->type.arg_types();
      const std::string& a = f->type.result_base().name();
      int n = static_cast<int>(args.size());
      std::vector<F> conds;
      if (f->arity == n) {
        for (int i = 0; i < n; ++i) {
          conds.push_back(base_dominates(a, args[static_cast<std::size_t>(i)]));
          if (!spos.spos(a, args[static_cast<std::size_t>(i)]).empty()) conds.push_back(no());
        }
      } else {
        for (int i = 1; i <= n; ++i) conds.push_back(P.neg(bvar(AtomKind::Acc, f->name, i)));
        Type rest = f->type.drop_args(f->arity);
        for (int i = 0; i < f->arity; ++i) {
          conds.push_back(base_dominates(a, args[static_cast<std::size_t>(i)]));
          conds.push_back(type_geqdot(rest, args[static_cast<std::size_t>(i)]));
        }
      }
      g.push_back(P.disj(big(f->name), P.conj(conds)));
    }
  }

  // --- judgments

  F strict(const Term& s, const Term& t, const VarSet& X) {
    if (!is_nonversatile_unchecked(s)) return no();
    JKey key{s, t, X};
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    if (!active_.insert(key).second)
      throw std::logic_error("judgment repeats on its own encoding path: " + to_string(s) + " > " + to_string(t));
    F body = search(s, t, X);
    active_.erase(key);
    check_budget();
    F r = body;
    if (body != yes() && body != no()) {
      int id = static_cast<int>(e_.defs.size());
      e_.defs.push_back(body);
      r = pool().def(id);
    }
    memo_.emplace(std::move(key), r);
    return r;
  }
  F strict_tau(const Term& s, const Term& t, const VarSet& X) {
    F ty = type_ge(s.type(), t.type());
    if (ty == no()) return no();
    return pool().conj(ty, strict(s, t, X));
  }
  F weak(const Term& s, const Term& t, const VarSet& X) { return s == t ? yes() : strict(s, t, X); }
  F weak_tau(const Term& s, const Term& t, const VarSet& X) { return s == t ? yes() : strict_tau(s, t, X); }

  F search(const Term& s, const Term& t, const VarSet& X) {
    switch (s.kind()) {
      case Term::Kind::Fun: {
        const std::string& f = s.symbol()->name;
        F b = big(f);
        return pool().disj(pool().conj(b, big_rules(s, t, X)), pool().conj(pool().neg(b), small_rules(s, t, X)));
      }
      case Term::Kind::App:
        return app_rules(s, t, X);
      case Term::Kind::Lam:
        return lam_rules(s, t, X);
      default:
        return no();
    }
  }

  F all_strict(const Term& s, const std::vector<Term>& us, const VarSet& X, bool tau) {
    std::vector<F> fs;
    for (const auto& u : us) {
      F k = tau ? strict_tau(s, u, X) : strict(s, u, X);
      if (k == no()) return no();
      fs.push_back(k);
    }
    return pool().conj(std::move(fs));
  }

  F path_guard(const std::vector<AccStep>& path) {
    std::vector<F> fs;
    for (const auto& st : path) fs.push_back(bvar(AtomKind::Acc, st.f->name, st.index));
    return pool().conj(std::move(fs));
  }

  F big_rules(const Term& s, const Term& t, const VarSet& X) {
    if (is_x(t, X)) return yes();
    const auto& ts = s.args();
    for (const auto& ti : ts)
      if (ti == t) return yes();
    const std::string& f = s.symbol()->name;
    std::vector<F> alts;
    if (t.is_fun()) {
      const std::string& g = t.symbol()->name;
      F gt = prec_gt(f, g);
      if (gt != no()) alts.push_back(pool().conj(gt, all_strict(s, t.args(), X, false)));
      F eq = prec_eq(f, g);
      if (eq != no()) alts.push_back(pool().conj(eq, big_equal(s, t, X)));
    } else if (t.is_app()) {
      alts.push_back(pool().conj(strict(s, t.fun(), X), strict(s, t.arg(), X)));
    } else if (t.is_lam()) {
      Var z = judgment_fresh(s, t, X, t.binder_type());
      alts.push_back(strict(s, open_with(t, z), with(X, z)));
    }
    alts.push_back(big_subterm(s, t));
    return pool().disj(std::move(alts));
  }

  // t_i |>=b w |>=acc u, with u >=tau t at the empty variable set.
  F big_subterm(const Term& s, const Term& t) {
    std::vector<std::pair<Term, std::vector<F>>> targets;
    auto add = [&](const Term& u, F guard) {
      for (auto& [v, gs] : targets)
        if (v == u) {
          gs.push_back(guard);
          return;
        }
      targets.push_back({u, {guard}});
    };
    for (const auto& ti : s.args()) {
      std::vector<std::pair<Term, F>> ws{{ti, yes()}};
      for (auto& w : bsubt_candidates(ti, true)) ws.push_back({w, bvar(AtomKind::Basic, w.type().name())});
      for (const auto& [w, gw] : ws) {
        add(w, gw);
        for (const auto& c : asubt_candidates(w)) add(c.target, pool().conj(gw, path_guard(c.path)));
      }
    }
    std::vector<F> alts;
    for (auto& [u, gs] : targets) {
      F g = pool().disj(gs);
      if (g == no()) continue;
      F k = weak_tau(u, t, {});
      if (k != no()) alts.push_back(pool().conj(g, k));
    }
    return pool().disj(std::move(alts));
  }

  F arg_dominates(const Term& ti, const Term& uj, const VarSet& X, bool with_struct) {
    std::vector<F> alts{strict_tau(ti, uj, {})};
    if (with_struct) {
      for (const auto& c : structsm_candidates(ti, X)) {
        if (!is_beta_eta_normal(c.witness)) continue;
        F g = path_guard(c.path);
        if (g == no()) continue;
        alts.push_back(pool().conj(g, weak_tau(c.witness, uj, {})));
      }
    }
    return pool().disj(std::move(alts));
  }

  // Multiset and lexicographic extensions with a symbolic dominance table.
  template <class Dom>
  F mul_formula(const std::vector<Term>& ts, const std::vector<Term>& us, Dom&& dom) {
    std::size_t n = ts.size(), m = us.size();
    if (n == 0 || n >= 8 * sizeof(unsigned long)) return no();
    std::vector<F> alts;
    for (unsigned long mask = 1; mask < (1ul << n); ++mask) {
      std::vector<bool> used(m, false);
      std::vector<std::size_t> removed;
      bool ok = true;
      for (std::size_t i = 0; i < n && ok; ++i) {
        if (mask >> i & 1) {
          removed.push_back(i);
          continue;
        }
        ok = false;
        for (std::size_t j = 0; j < m; ++j)
          if (!used[j] && ts[i] == us[j]) {
            used[j] = ok = true;
            break;
          }
      }
      if (!ok) continue;
      std::vector<F> need;
      for (std::size_t j = 0; j < m; ++j) {
        if (used[j]) continue;
        std::vector<F> any;
        for (std::size_t y : removed) any.push_back(dom(y, j));
        need.push_back(pool().disj(std::move(any)));
      }
      alts.push_back(pool().conj(std::move(need)));
      if (alts.back() == yes()) break;
    }
    return pool().disj(std::move(alts));
  }

  template <class Dom, class Rest>
  F lex_formula(const std::vector<Term>& ts, const std::vector<Term>& us, Dom&& dom, Rest&& rest) {
    std::size_t k = std::min(ts.size(), us.size());
    std::vector<F> alts;
    for (std::size_t i = 0; i < k; ++i) {
      alts.push_back(pool().conj(dom(i, i), rest(i)));
      if (!(ts[i] == us[i])) break;
    }
    return pool().disj(std::move(alts));
  }

  F big_equal(const Term& s, const Term& t, const VarSet& X) {
    const auto& ts = s.args();
    const auto& us = t.args();
    std::map<std::pair<std::size_t, std::size_t>, F> table;
    auto dom = [&](std::size_t i, std::size_t j) {
      auto key = std::make_pair(i, j);
      if (auto it = table.find(key); it != table.end()) return it->second;
      F r = arg_dominates(ts[i], us[j], X, true);
      table.emplace(key, r);
      return r;
    };
    F pre = opts_.optimized_feq ? yes() : all_strict(s, us, X, false);
    if (pre == no()) return no();
    auto rest = [&](std::size_t i) {
      if (!opts_.optimized_feq) return yes();
      std::vector<Term> tail(us.begin() + static_cast<long>(i) + 1, us.end());
      return all_strict(s, tail, X, false);
    };
    F mul = bvar(AtomKind::Mul, s.symbol()->name);
    F mf = mul_formula(ts, us, dom);
    F lf = lex_formula(ts, us, dom, rest);
    return pool().conj(pre, pool().disj(pool().conj(mul, mf), pool().conj(pool().neg(mul), lf)));
  }

  F small_rules(const Term& s, const Term& t, const VarSet& X) {
    if (is_x(t, X)) return yes();
    const auto& ts = s.args();
    std::vector<F> alts;
    for (const auto& ti : ts) alts.push_back(weak_tau(ti, t, {}));
    const std::string& f = s.symbol()->name;
    if (t.is_fun()) {
      const std::string& g = t.symbol()->name;
      F gt = prec_gt(f, g), eq = prec_eq(f, g);
      if (gt != no() || eq != no()) {
        F kids = all_strict(s, t.args(), X, true);
        if (kids != no()) {
          F ext = eq == no() ? no() : pool().conj(eq, small_equal(s, t, X));
          alts.push_back(pool().conj(kids, pool().disj(gt, ext)));
        }
      }
    } else if (t.is_app()) {
      alts.push_back(pool().conj(strict_tau(s, t.fun(), X), strict_tau(s, t.arg(), X)));
    }
    return pool().disj(std::move(alts));
  }

  F small_equal(const Term& s, const Term& t, const VarSet& X) {
    const auto& ts = s.args();
    const auto& us = t.args();
    std::map<std::pair<std::size_t, std::size_t>, F> table;
    auto dom = [&](std::size_t i, std::size_t j) {
      auto key = std::make_pair(i, j);
      if (auto it = table.find(key); it != table.end()) return it->second;
      F r = arg_dominates(ts[i], us[j], X, false);
      table.emplace(key, r);
      return r;
    };
    auto none = [&](std::size_t) { return yes(); };
    F mul = bvar(AtomKind::Mul, s.symbol()->name);
    F mf = mul_formula(ts, us, dom);
    F lf = lex_formula(ts, us, dom, none);
    return pool().disj(pool().conj(mul, mf), pool().conj(pool().neg(mul), lf));
  }

  F app_helper(const Term& s, const Term& w, const VarSet& X) {
    return pool().disj({strict_tau(s.fun(), w, X), weak_tau(s.arg(), w, X), strict_tau(s, w, X)});
  }

  F small_head(const Term& s, const Term& t, const VarSet& X) {
    F small = pool().neg(big(t.symbol()->name));
    return pool().conj(small, all_strict(s, t.args(), X, true));
  }

  F app_rules(const Term& s, const Term& t, const VarSet& X) {
    if (is_x(t, X)) return yes();
    std::vector<F> alts{weak(s.fun(), t, X), weak_tau(s.arg(), t, X)};
    if (t.is_app()) {
      if (s.fun() == t.fun()) alts.push_back(strict(s.arg(), t.arg(), X));
      alts.push_back(pool().conj(app_helper(s, t.fun(), X), app_helper(s, t.arg(), X)));
    } else if (t.is_lam()) {
      Var z = judgment_fresh(s, t, X, t.binder_type());
      alts.push_back(strict(s, open_with(t, z), X));
    } else if (t.is_fun()) {
      alts.push_back(small_head(s, t, X));
    }
    return pool().disj(std::move(alts));
  }

  F lam_rules(const Term& s, const Term& t, const VarSet& X) {
    if (is_x(t, X)) return yes();
    Var z = judgment_fresh(s, t, X, s.binder_type());
    Term body = open_with(s, z);
    std::vector<F> alts{weak_tau(body, t, X)};
    if (!t.is_lam() && t.type().is_arrow() && t.type().domain() == s.binder_type())
      alts.push_back(weak_tau(body, Term::app(t, Term::var(z)), X));
    if (t.is_lam()) {
      if (t.binder_type() == s.binder_type()) {
        alts.push_back(strict(body, open_with(t, z), X));
      } else {
        Var y = judgment_fresh(s, t, X, t.binder_type());
        alts.push_back(strict(s, open_with(t, y), X));
      }
    } else if (t.is_fun()) {
      alts.push_back(small_head(s, t, X));
    }
    return pool().disj(std::move(alts));
  }

  const Problem& p_;
  EncodeOptions opts_;
  Encoding& e_;
  std::map<std::tuple<AtomKind, std::string, int>, int> atom_ids_;
  std::map<std::pair<Type, Type>, F> tgt_;
  std::unordered_map<JKey, F, JKeyHash> memo_;
  std::unordered_set<JKey, JKeyHash> active_;
};

}  // namespace

Encoding encode_problem(const Problem& p, EncodeOptions options) {
  Encoding e;
  e.symbol_count = static_cast<int>(p.symbols.size());
  e.base_count = static_cast<int>(p.base_types.size());
  Encoder(p, options, e).run();
  return e;
}

// ---------------------------------------------------------------------------
// script

namespace {

void print(const Encoding& e, F f, std::string& out) {
  using Op = FormulaPool::Op;
  const auto& n = e.pool.node(f);
  auto name = [&](int a) { return smt_symbol(e.atoms[static_cast<std::size_t>(a)].name); };
  switch (n.op) {
    case Op::True:
      out += "true";
      return;
    case Op::False:
      out += "false";
      return;
    case Op::Var:
      out += name(n.a);
      return;
    case Op::Gt:
      out += "(> " + name(n.a) + " " + name(n.b) + ")";
      return;
    case Op::Ge:
      out += "(>= " + name(n.a) + " " + name(n.b) + ")";
      return;
    case Op::Eq:
      out += "(= " + name(n.a) + " " + name(n.b) + ")";
      return;
    case Op::Def:
      out += "d_" + std::to_string(n.a);
      return;
    case Op::Not:
      out += "(not ";
      print(e, n.kids[0], out);
      out += ")";
      return;
    case Op::And:
    case Op::Or:
      out += n.op == Op::And ? "(and" : "(or";
      for (F k : n.kids) {
        out += " ";
        print(e, k, out);
      }
      out += ")";
      return;
  }
}

}  // namespace

std::string smt_script(const Encoding& e) {
  std::string out = "(set-logic QF_LIA)\n";
  for (const auto& a : e.atoms)
    out += "(declare-const " + smt_symbol(a.name) + (a.is_int() ? " Int)\n" : " Bool)\n");
  for (std::size_t i = 0; i < e.defs.size(); ++i) out += "(declare-const d_" + std::to_string(i) + " Bool)\n";
  for (const auto& a : e.atoms) {
    if (!a.is_int()) continue;
    int bound = a.kind == AtomKind::Prec ? e.symbol_count : e.base_count;
    out += "(assert (and (<= 0 " + smt_symbol(a.name) + ") (< " + smt_symbol(a.name) + " " +
           std::to_string(std::max(bound, 1)) + ")))\n";
  }
  for (F g : e.global) {
    if (g == e.pool.truth()) continue;
    out += "(assert ";
    print(e, g, out);
    out += ")\n";
  }
  for (std::size_t i = 0; i < e.defs.size(); ++i) {
    out += "(assert (= d_" + std::to_string(i) + " ";
    print(e, e.defs[i], out);
    out += "))\n";
  }
  for (std::size_t i = 0; i < e.roots.size(); ++i) {
    out += "; rule " + e.rule_names[i] + "\n(assert ";
    print(e, e.roots[i], out);
    out += ")\n";
  }
  out += "(check-sat)\n(get-model)\n";
  return out;
}

// ---------------------------------------------------------------------------
// solver process

SolverResult run_solver(const std::string& script, const std::string& command, double timeout_seconds) {
  if (command.empty()) throw SolverError("no solver command configured");
  int in[2], out[2], err[2];
  // close-on-exec, or solvers started by other threads keep our stdin open
  if (pipe2(in, O_CLOEXEC) != 0 || pipe2(out, O_CLOEXEC) != 0 || pipe2(err, O_CLOEXEC) != 0)
    throw SolverError(std::string("pipe: ") + strerror(errno));
  auto start = std::chrono::steady_clock::now();
  pid_t pid = fork();
  if (pid < 0) throw SolverError(std::string("fork: ") + strerror(errno));
  if (pid == 0) {
    setpgid(0, 0);
    dup2(in[0], 0);
    dup2(out[1], 1);
    dup2(err[1], 2);
    for (int fd : {in[0], in[1], out[0], out[1], err[0], err[1]}) close(fd);
    execl("/bin/sh", "sh", "-c", ("exec " + command).c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  setpgid(pid, pid);
  close(in[0]);
  close(out[1]);
  close(err[1]);
  signal(SIGPIPE, SIG_IGN);
  for (int fd : {in[1], out[0], err[0]}) fcntl(fd, F_SETFL, fcntl(fd, F_GETFL) | O_NONBLOCK);

  SolverResult r;
  std::string stdout_text;
  std::size_t written = 0;
  int wfd = in[1], ofd = out[0], efd = err[0];
  if (script.empty()) {
    close(wfd);
    wfd = -1;
  }
  auto deadline = start + std::chrono::duration<double>(timeout_seconds);
  char buf[65536];
  while (ofd >= 0 || efd >= 0) {
    auto now = std::chrono::steady_clock::now();
    if (timeout_seconds > 0 && now >= deadline) {
      r.timed_out = true;
      break;
    }
    std::vector<pollfd> fds;
    if (wfd >= 0) fds.push_back({wfd, POLLOUT, 0});
    if (ofd >= 0) fds.push_back({ofd, POLLIN, 0});
    if (efd >= 0) fds.push_back({efd, POLLIN, 0});
    int wait_ms = 200;
    if (timeout_seconds > 0) {
      auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count();
      wait_ms = static_cast<int>(std::clamp<long long>(left, 1, 200));
    }
    if (poll(fds.data(), fds.size(), wait_ms) < 0 && errno != EINTR) break;
    for (const auto& p : fds) {
      if (!p.revents) continue;
      if (p.fd == wfd) {
        ssize_t k = write(wfd, script.data() + written, script.size() - written);
        if (k > 0) written += static_cast<std::size_t>(k);
        if (k < 0 && errno != EAGAIN) written = script.size();
        if (written >= script.size()) {
          close(wfd);
          wfd = -1;
        }
      } else {
        ssize_t k = read(p.fd, buf, sizeof buf);
        if (k > 0) {
          (p.fd == ofd ? stdout_text : r.stderr_text).append(buf, static_cast<std::size_t>(k));
        } else if (k == 0 || errno != EAGAIN) {
          close(p.fd);
          (p.fd == ofd ? ofd : efd) = -1;
        }
      }
    }
  }
  for (int fd : {wfd, ofd, efd})
    if (fd >= 0) close(fd);
  int status = 0;
  if (r.timed_out) kill(-pid, SIGKILL);
  waitpid(pid, &status, 0);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (r.timed_out) {
    r.status = SolverStatus::Unknown;
    return r;
  }
  if (WIFEXITED(status) && WEXITSTATUS(status) == 127 && stdout_text.empty())
    throw SolverError("cannot run solver: " + command + (r.stderr_text.empty() ? "" : ": " + r.stderr_text));

  std::istringstream lines(stdout_text);
  std::string first;
  while (std::getline(lines, first) && first.find_first_not_of(" \t\r") == std::string::npos) {
  }
  first.erase(first.find_last_not_of(" \t\r") + 1);
  if (first == "sat") {
    r.status = SolverStatus::Sat;
    std::ostringstream rest;
    rest << lines.rdbuf();
    r.model = rest.str();
  } else if (first == "unsat") {
    r.status = SolverStatus::Unsat;
  } else if (first == "unknown") {
    r.status = SolverStatus::Unknown;
  } else {
    throw SolverError("unexpected solver answer: " + (stdout_text.empty() ? r.stderr_text : stdout_text));
  }
  return r;
}

// ---------------------------------------------------------------------------
// models

namespace {

struct SExpr {
  std::string atom;
  std::vector<SExpr> list;
  bool is_list = false;
};

class SParser {
 public:
  explicit SParser(const std::string& s) : s_(s) {}

  std::vector<SExpr> all() {
    std::vector<SExpr> out;
    for (skip(); i_ < s_.size(); skip()) out.push_back(expr());
    return out;
  }

 private:
  void skip() {
    while (i_ < s_.size()) {
      if (std::isspace(static_cast<unsigned char>(s_[i_]))) {
        ++i_;
      } else if (s_[i_] == ';') {
        while (i_ < s_.size() && s_[i_] != '\n') ++i_;
      } else {
        break;
      }
    }
  }
  SExpr expr() {
    skip();
    if (i_ >= s_.size()) throw ModelError("unexpected end of model");
    SExpr e;
    if (s_[i_] == '(') {
      ++i_;
      e.is_list = true;
      for (skip(); i_ < s_.size() && s_[i_] != ')'; skip()) e.list.push_back(expr());
      if (i_ >= s_.size()) throw ModelError("unbalanced parentheses in model");
      ++i_;
      return e;
    }
    if (s_[i_] == ')') throw ModelError("unexpected ')' in model");
    if (s_[i_] == '|') {
      std::size_t j = s_.find('|', i_ + 1);
      if (j == std::string::npos) throw ModelError("unterminated |symbol| in model");
      e.atom = s_.substr(i_ + 1, j - i_ - 1);
      i_ = j + 1;
      return e;
    }
    if (s_[i_] == '"') {
      std::size_t j = s_.find('"', i_ + 1);
      if (j == std::string::npos) throw ModelError("unterminated string in model");
      e.atom = s_.substr(i_, j - i_ + 1);
      i_ = j + 1;
      return e;
    }
    std::size_t j = i_;
    while (j < s_.size() && !std::isspace(static_cast<unsigned char>(s_[j])) && s_[j] != '(' && s_[j] != ')') ++j;
    e.atom = s_.substr(i_, j - i_);
    i_ = j;
    return e;
  }

  const std::string& s_;
  std::size_t i_ = 0;
};

long long parse_int(const SExpr& e) {
  if (e.is_list) {
    if (e.list.size() == 2 && !e.list[0].is_list && e.list[0].atom == "-") return -parse_int(e.list[1]);
    throw ModelError("unsupported integer value in model");
  }
  try {
    std::size_t used = 0;
    long long v = std::stoll(e.atom, &used);
    if (used != e.atom.size()) throw ModelError("bad integer " + e.atom);
    return v;
  } catch (const std::logic_error&) {
    throw ModelError("bad integer " + e.atom);
  }
}

}  // namespace

std::map<std::string, ModelValue> parse_model(const std::string& text) {
  std::map<std::string, ModelValue> out;
  auto top = SParser(text).all();
  std::vector<const SExpr*> entries;
  for (const auto& t : top) {
    if (!t.is_list) throw ModelError("model is not a list of definitions");
    if (!t.list.empty() && !t.list[0].is_list && t.list[0].atom == "define-fun") {
      entries.push_back(&t);
    } else {
      std::size_t k = 0;
      if (!t.list.empty() && !t.list[0].is_list && t.list[0].atom == "model") k = 1;
      for (; k < t.list.size(); ++k) entries.push_back(&t.list[k]);
    }
  }
  for (const SExpr* d : entries) {
    const auto& l = d->list;
    if (!d->is_list || l.size() != 5 || l[0].is_list || l[0].atom != "define-fun" || l[1].is_list)
      throw ModelError("malformed model entry");
    if (!l[2].is_list || !l[2].list.empty()) continue;  // functions with arguments are not ours
    if (l[3].is_list) throw ModelError("unsupported sort for " + l[1].atom);
    ModelValue v;
    if (l[3].atom == "Int") {
      v.is_int = true;
      v.value = parse_int(l[4]);
    } else if (l[3].atom == "Bool") {
      if (l[4].is_list || (l[4].atom != "true" && l[4].atom != "false"))
        throw ModelError("bad boolean value for " + l[1].atom);
      v.value = l[4].atom == "true";
    } else {
      throw ModelError("unsupported sort " + l[3].atom + " for " + l[1].atom);
    }
    out[l[1].atom] = v;
  }
  return out;
}

OrderParams decode_model(const std::string& text, const Problem& p) {
  auto model = parse_model(text);
  OrderParams o = OrderParams::defaults(p);
  for (const auto& a : problem_atoms(p)) {
    auto it = model.find(a.name);
    if (it == model.end()) continue;
    if (it->second.is_int != a.is_int()) throw ModelError("type mismatch in binding of " + a.name);
    long long v = it->second.value;
    switch (a.kind) {
      case AtomKind::Prec:
        o.prec[a.subject] = static_cast<int>(v);
        break;
      case AtomKind::Level:
        o.levels.set(a.subject, static_cast<int>(v));
        break;
      case AtomKind::Mul:
        o.status[a.subject] = v ? Status::Mul : Status::Lex;
        break;
      case AtomKind::Big:
        o.big[a.subject] = v != 0;
        break;
      case AtomKind::Acc:
        if (v) o.acc[a.subject].insert(a.index);
        break;
      case AtomKind::Basic:
        o.basic[a.subject] = v != 0;
        break;
    }
  }
  return o;
}

}  // namespace hoterm

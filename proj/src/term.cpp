#include "hoterm/term.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <ostream>
#include <unordered_set>

namespace hoterm {

std::size_t Var::hash() const {
  std::size_t h = hash_mix(0xfa7, std::hash<std::string>{}(name));
  h = hash_mix(h, static_cast<std::size_t>(fresh));
  return hash_mix(h, type.hash());
}

std::string Var::str() const { return fresh > 0 ? "_z" + std::to_string(fresh) : name; }

Symbol make_symbol(std::string name, Type type, int arity, int id) {
  if (!type.valid()) throw TypeError("symbol " + name + " has no type");
  if (arity < 0 || arity > type.arrow_count())
    throw TypeError("arity " + std::to_string(arity) + " too large for " + name + " : " + type.str());
  return std::make_shared<const SymbolInfo>(SymbolInfo{std::move(name), std::move(type), arity, id});
}

// ---------------------------------------------------------------------------
// construction

Term Term::bound(int index, Type type) {
  if (index < 0) throw TypeError("negative de Bruijn index");
  auto n = std::make_shared<TermNode>();
  n->kind = Kind::Bound;
  n->index = index;
  n->hash = hash_mix(hash_mix(0xb0, static_cast<std::size_t>(index)), type.hash());
  n->type = std::move(type);
  n->loose = index + 1;
  return Term(std::move(n));
}

Term Term::var(Var v) {
  if (!v.type.valid()) throw TypeError("variable " + v.name + " has no type");
  auto n = std::make_shared<TermNode>();
  n->kind = Kind::Free;
  n->hash = hash_mix(0xf2, v.hash());
  n->type = v.type;
  n->max_fresh = v.fresh;
  n->var = std::move(v);
  return Term(std::move(n));
}

Term Term::fun(Symbol f, std::vector<Term> args) {
  if (static_cast<int>(args.size()) != f->arity)
    throw TypeError(f->name + " expects " + std::to_string(f->arity) + " arguments, got " +
                    std::to_string(args.size()));
  Type t = f->type;
  auto n = std::make_shared<TermNode>();
  n->kind = Kind::Fun;
  std::size_t h = hash_mix(0xf0, std::hash<std::string>{}(f->name));
  for (const auto& a : args) {
    if (a.type() != t.domain())
      throw TypeError("argument of " + f->name + " has type " + a.type().str() + ", expected " +
                      t.domain().str());
    t = t.codomain();
    h = hash_mix(h, a.hash());
    n->size += a.size();
    n->loose = std::max(n->loose, a.loose());
    n->max_fresh = std::max(n->max_fresh, a.max_fresh());
  }
  n->hash = h;
  n->type = std::move(t);
  n->sym = std::move(f);
  n->kids = std::move(args);
  return Term(std::move(n));
}

Term Term::app(Term f, Term a) {
  if (!f.type().is_arrow()) throw TypeError("applying a term of base type " + f.type().str());
  if (f.type().domain() != a.type())
    throw TypeError("argument type " + a.type().str() + " does not match " + f.type().str());
  auto n = std::make_shared<TermNode>();
  n->kind = Kind::App;
  n->type = f.type().codomain();
  n->hash = hash_mix(hash_mix(0xa0, f.hash()), a.hash());
  n->size = 1 + f.size() + a.size();
  n->loose = std::max(f.loose(), a.loose());
  n->max_fresh = std::max(f.max_fresh(), a.max_fresh());
  n->kids = {std::move(f), std::move(a)};
  return Term(std::move(n));
}

Term Term::apps(Term head, const std::vector<Term>& args) {
  for (const auto& a : args) head = app(std::move(head), a);
  return head;
}

Term Term::lam(Type binder, Term body, std::string hint) {
  auto n = std::make_shared<TermNode>();
  n->kind = Kind::Lam;
  n->type = Type::arrow(binder, body.type());
  n->hash = hash_mix(hash_mix(0x1a, binder.hash()), body.hash());
  n->size = 1 + body.size();
  n->loose = std::max(0, body.loose() - 1);
  n->max_fresh = body.max_fresh();
  n->binder = std::move(binder);
  n->hint = std::move(hint);
  n->kids = {std::move(body)};
  return Term(std::move(n));
}

Term Term::lambda(const Var& x, const Term& body) {
  return lam(x.type, abstract(body, x), x.fresh > 0 ? "z" : x.name);
}

// ---------------------------------------------------------------------------
// accessors

Term::Kind Term::kind() const { return node_->kind; }
const Type& Term::type() const { return node_->type; }

int Term::index() const {
  if (!is_bound()) throw std::logic_error("index() on non-bound term");
  return node_->index;
}
const Var& Term::var() const {
  if (!is_var()) throw std::logic_error("var() on non-variable term");
  return node_->var;
}
const Symbol& Term::symbol() const {
  if (!is_fun()) throw std::logic_error("symbol() on non-function term");
  return node_->sym;
}
const std::vector<Term>& Term::args() const {
  if (!is_fun()) throw std::logic_error("args() on non-function term");
  return node_->kids;
}
const Term& Term::fun() const {
  if (!is_app()) throw std::logic_error("fun() on non-application");
  return node_->kids[0];
}
const Term& Term::arg() const {
  if (!is_app()) throw std::logic_error("arg() on non-application");
  return node_->kids[1];
}
const Type& Term::binder_type() const {
  if (!is_lam()) throw std::logic_error("binder_type() on non-abstraction");
  return node_->binder;
}
const Term& Term::body() const {
  if (!is_lam()) throw std::logic_error("body() on non-abstraction");
  return node_->kids[0];
}
const std::string& Term::hint() const { return node_->hint; }

std::size_t Term::hash() const { return node_->hash; }
int Term::size() const { return node_->size; }
int Term::loose() const { return node_->loose; }
int Term::max_fresh() const { return node_->max_fresh; }

bool operator==(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return true;
  if (!a.node_ || !b.node_) return false;
  const TermNode& x = *a.node_;
  const TermNode& y = *b.node_;
  if (x.hash != y.hash || x.kind != y.kind || x.size != y.size) return false;
  switch (x.kind) {
    case Term::Kind::Bound:
      return x.index == y.index && x.type == y.type;
    case Term::Kind::Free:
      return x.var == y.var;
    case Term::Kind::Fun:
      return x.sym->name == y.sym->name && x.sym->type == y.sym->type && x.kids == y.kids;
    case Term::Kind::App:
      return x.kids == y.kids;
    case Term::Kind::Lam:
      return x.binder == y.binder && x.kids == y.kids;
  }
  return false;
}

// ---------------------------------------------------------------------------
// variables and indices

namespace {

void collect_free(const Term& t, VarSet& out) {
  switch (t.kind()) {
    case Term::Kind::Free:
      out.insert(t.var());
      return;
    case Term::Kind::Bound:
      return;
    case Term::Kind::Fun:
      for (const auto& a : t.args()) collect_free(a, out);
      return;
    case Term::Kind::App:
      collect_free(t.fun(), out);
      collect_free(t.arg(), out);
      return;
    case Term::Kind::Lam:
      collect_free(t.body(), out);
      return;
  }
}

Term rebuild(const Term& t, const std::function<Term(const Term&, int)>& leaf, int depth) {
  switch (t.kind()) {
    case Term::Kind::Bound:
    case Term::Kind::Free:
      return leaf(t, depth);
    case Term::Kind::Fun: {
      std::vector<Term> args;
      args.reserve(t.args().size());
      for (const auto& a : t.args()) args.push_back(rebuild(a, leaf, depth));
      return Term::fun(t.symbol(), std::move(args));
    }
    case Term::Kind::App:
      return Term::app(rebuild(t.fun(), leaf, depth), rebuild(t.arg(), leaf, depth));
    case Term::Kind::Lam:
      return Term::lam(t.binder_type(), rebuild(t.body(), leaf, depth + 1), t.hint());
  }
  return t;
}

}  // namespace

VarSet free_vars(const Term& t) {
  VarSet out;
  collect_free(t, out);
  return out;
}

bool occurs_free(const Term& t, const Var& x) {
  switch (t.kind()) {
    case Term::Kind::Free:
      return t.var() == x;
    case Term::Kind::Bound:
      return false;
    case Term::Kind::Fun:
      return std::any_of(t.args().begin(), t.args().end(), [&](const Term& a) { return occurs_free(a, x); });
    case Term::Kind::App:
      return occurs_free(t.fun(), x) || occurs_free(t.arg(), x);
    case Term::Kind::Lam:
      return occurs_free(t.body(), x);
  }
  return false;
}

bool has_loose_index(const Term& t, int idx) {
  if (t.loose() <= idx) return false;
  switch (t.kind()) {
    case Term::Kind::Bound:
      return t.index() == idx;
    case Term::Kind::Free:
      return false;
    case Term::Kind::Fun:
      return std::any_of(t.args().begin(), t.args().end(),
                         [&](const Term& a) { return has_loose_index(a, idx); });
    case Term::Kind::App:
      return has_loose_index(t.fun(), idx) || has_loose_index(t.arg(), idx);
    case Term::Kind::Lam:
      return has_loose_index(t.body(), idx + 1);
  }
  return false;
}

Term shift(const Term& t, int delta, int cutoff) {
  if (delta == 0 || t.loose() <= cutoff) return t;
  return rebuild(
      t,
      [&](const Term& leaf, int depth) {
        if (!leaf.is_bound() || leaf.index() < cutoff + depth) return leaf;
        int ni = leaf.index() + delta;
        if (ni < cutoff + depth) throw std::logic_error("shift would capture an index");
        return Term::bound(ni, leaf.type());
      },
      0);
}

namespace {

Term subst_index(const Term& t, int depth, const Term& value) {
  if (t.loose() <= depth) return t;
  switch (t.kind()) {
    case Term::Kind::Bound:
      if (t.index() == depth) return shift(value, depth);
      return Term::bound(t.index() - 1, t.type());
    case Term::Kind::Free:
      return t;
    case Term::Kind::Fun: {
      std::vector<Term> args;
      for (const auto& a : t.args()) args.push_back(subst_index(a, depth, value));
      return Term::fun(t.symbol(), std::move(args));
    }
    case Term::Kind::App:
      return Term::app(subst_index(t.fun(), depth, value), subst_index(t.arg(), depth, value));
    case Term::Kind::Lam:
      return Term::lam(t.binder_type(), subst_index(t.body(), depth + 1, value), t.hint());
  }
  return t;
}

}  // namespace

Term instantiate(const Term& body, const Term& value) { return subst_index(body, 0, value); }

Term abstract(const Term& t, const Var& x) {
  // Shift loose indices up by one first so they stay pointing outside the new binder.
  Term s = shift(t, 1);
  return rebuild(
      s,
      [&](const Term& leaf, int depth) {
        if (leaf.is_var() && leaf.var() == x) return Term::bound(depth, leaf.type());
        return leaf;
      },
      0);
}

Term open_with(const Term& lam, const Var& z) {
  if (z.type != lam.binder_type()) throw TypeError("opening binder of type " + lam.binder_type().str());
  return instantiate(lam.body(), Term::var(z));
}

Term substitute(const Term& t, const Substitution& sigma) {
  if (sigma.empty()) return t;
  for (const auto& [x, v] : sigma) {
    if (x.type != v.type()) throw TypeError("substitution for " + x.str() + " is ill-typed");
    if (v.loose() > 0) throw std::logic_error("substituted value has dangling indices");
  }
  return rebuild(
      t,
      [&](const Term& leaf, int) {
        if (leaf.is_var()) {
          auto it = sigma.find(leaf.var());
          if (it != sigma.end()) return it->second;
        }
        return leaf;
      },
      0);
}

// ---------------------------------------------------------------------------
// reduction

Term beta_normalize(const Term& t) {
  switch (t.kind()) {
    case Term::Kind::Bound:
    case Term::Kind::Free:
      return t;
    case Term::Kind::Fun: {
      std::vector<Term> args;
      for (const auto& a : t.args()) args.push_back(beta_normalize(a));
      return Term::fun(t.symbol(), std::move(args));
    }
    case Term::Kind::Lam:
      return Term::lam(t.binder_type(), beta_normalize(t.body()), t.hint());
    case Term::Kind::App: {
      Term h = beta_normalize(t.fun());
      if (h.is_lam()) return beta_normalize(instantiate(h.body(), t.arg()));
      return Term::app(h, beta_normalize(t.arg()));
    }
  }
  return t;
}

namespace {

bool is_eta_redex(const Term& lam) {
  if (!lam.is_lam()) return false;
  const Term& b = lam.body();
  return b.is_app() && b.arg().is_bound() && b.arg().index() == 0 && !has_loose_index(b.fun(), 0);
}

}  // namespace

Term eta_normalize(const Term& t) {
  switch (t.kind()) {
    case Term::Kind::Bound:
    case Term::Kind::Free:
      return t;
    case Term::Kind::Fun: {
      std::vector<Term> args;
      for (const auto& a : t.args()) args.push_back(eta_normalize(a));
      return Term::fun(t.symbol(), std::move(args));
    }
    case Term::Kind::App:
      return Term::app(eta_normalize(t.fun()), eta_normalize(t.arg()));
    case Term::Kind::Lam: {
      Term l = Term::lam(t.binder_type(), eta_normalize(t.body()), t.hint());
      if (is_eta_redex(l)) return shift(l.body().fun(), -1);
      return l;
    }
  }
  return t;
}

Term beta_eta_normalize(const Term& t) { return eta_normalize(beta_normalize(t)); }

bool is_beta_eta_normal(const Term& t) {
  switch (t.kind()) {
    case Term::Kind::Bound:
    case Term::Kind::Free:
      return true;
    case Term::Kind::Fun:
      return std::all_of(t.args().begin(), t.args().end(), is_beta_eta_normal);
    case Term::Kind::App:
      return !t.fun().is_lam() && is_beta_eta_normal(t.fun()) && is_beta_eta_normal(t.arg());
    case Term::Kind::Lam:
      return !is_eta_redex(t) && is_beta_eta_normal(t.body());
  }
  return true;
}

std::vector<Term> one_step_reducts(const Term& t) {
  std::vector<Term> out;
  switch (t.kind()) {
    case Term::Kind::Bound:
    case Term::Kind::Free:
      break;
    case Term::Kind::Fun:
      for (std::size_t i = 0; i < t.args().size(); ++i) {
        for (auto& r : one_step_reducts(t.args()[i])) {
          auto args = t.args();
          args[i] = std::move(r);
          out.push_back(Term::fun(t.symbol(), std::move(args)));
        }
      }
      break;
    case Term::Kind::App:
      if (t.fun().is_lam()) out.push_back(instantiate(t.fun().body(), t.arg()));
      for (auto& r : one_step_reducts(t.fun())) out.push_back(Term::app(std::move(r), t.arg()));
      for (auto& r : one_step_reducts(t.arg())) out.push_back(Term::app(t.fun(), std::move(r)));
      break;
    case Term::Kind::Lam:
      if (is_eta_redex(t)) out.push_back(shift(t.body().fun(), -1));
      for (auto& r : one_step_reducts(t.body())) out.push_back(Term::lam(t.binder_type(), std::move(r), t.hint()));
      break;
  }
  return out;
}

std::vector<Term> enumerate_beta_eta_reducts(const Term& t, std::size_t size_cap) {
  std::unordered_set<Term, TermHash> seen{t};
  std::vector<Term> order{t};
  std::deque<Term> queue{t};
  while (!queue.empty()) {
    Term cur = queue.front();
    queue.pop_front();
    for (auto& r : one_step_reducts(cur)) {
      if (seen.insert(r).second) {
        if (seen.size() > size_cap) throw CapExceeded("more than " + std::to_string(size_cap) + " reducts");
        order.push_back(r);
        queue.push_back(r);
      }
    }
  }
  return order;
}

// ---------------------------------------------------------------------------
// positions

namespace {

void positions(const Term& t, std::vector<int>& path, FreshSupply& supply, std::vector<Subterm>& out) {
  out.push_back(Subterm{path, t});
  switch (t.kind()) {
    case Term::Kind::Bound:
    case Term::Kind::Free:
      return;
    case Term::Kind::Fun:
      for (std::size_t i = 0; i < t.args().size(); ++i) {
        path.push_back(static_cast<int>(i) + 1);
        positions(t.args()[i], path, supply, out);
        path.pop_back();
      }
      return;
    case Term::Kind::App:
      path.push_back(1);
      positions(t.fun(), path, supply, out);
      path.back() = 2;
      positions(t.arg(), path, supply, out);
      path.pop_back();
      return;
    case Term::Kind::Lam: {
      Var z = supply.fresh(t.binder_type(), t.hint());
      path.push_back(1);
      positions(open_with(t, z), path, supply, out);
      path.pop_back();
      return;
    }
  }
}

}  // namespace

std::vector<Subterm> subterm_positions(const Term& t, FreshSupply& supply) {
  std::vector<Subterm> out;
  std::vector<int> path;
  positions(t, path, supply, out);
  return out;
}

Spine spine(const Term& t) {
  Spine s;
  Term cur = t;
  while (cur.is_app()) {
    s.args.push_back(cur.arg());
    cur = cur.fun();
  }
  std::reverse(s.args.begin(), s.args.end());
  s.head = cur;
  return s;
}

// ---------------------------------------------------------------------------
// printing

namespace {

struct Printer {
  std::set<std::string> reserved;
  std::vector<std::string> ctx;  // innermost binder last

  std::string binder_name(const std::string& hint) {
    std::string base = hint.empty() ? "x" : hint;
    auto taken = [&](const std::string& n) {
      return reserved.count(n) || std::find(ctx.begin(), ctx.end(), n) != ctx.end();
    };
    if (!taken(base)) return base;
    for (int i = 1;; ++i) {
      std::string n = base + std::to_string(i);
      if (!taken(n)) return n;
    }
  }

  std::string print(const Term& t) {
    switch (t.kind()) {
      case Term::Kind::Bound: {
        int i = t.index();
        if (i < static_cast<int>(ctx.size())) return ctx[ctx.size() - 1 - i];
        return "#" + std::to_string(i - static_cast<int>(ctx.size()));
      }
      case Term::Kind::Free:
        return t.var().str();
      case Term::Kind::Fun: {
        std::string s = t.symbol()->name;
        if (t.args().empty()) return s;
        s += "(";
        for (std::size_t i = 0; i < t.args().size(); ++i) {
          if (i) s += ", ";
          s += print(t.args()[i]);
        }
        return s + ")";
      }
      case Term::Kind::App: {
        std::string f = print(t.fun());
        if (t.fun().is_lam()) f = "(" + f + ")";
        std::string a = print(t.arg());
        if (t.arg().is_app() || t.arg().is_lam()) a = "(" + a + ")";
        return f + " " + a;
      }
      case Term::Kind::Lam: {
        std::string n = binder_name(t.hint());
        ctx.push_back(n);
        std::string b = print(t.body());
        ctx.pop_back();
        return "λ" + n + "." + b;
      }
    }
    return "?";
  }
};

}  // namespace

std::string to_string(const Term& t) {
  if (!t.valid()) return "<invalid>";
  Printer p;
  for (const auto& v : free_vars(t)) p.reserved.insert(v.str());
  return p.print(t);
}

std::ostream& operator<<(std::ostream& os, const Term& t) { return os << to_string(t); }

}  // namespace hoterm

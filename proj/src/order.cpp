#include "hoterm/order.hpp"

#include <algorithm>
#include <sstream>

#include "hoterm/extension.hpp"

namespace hoterm {

namespace {

bool is_x(const Term& t, const VarSet& X) { return t.is_var() && X.count(t.var()); }

Proof retag(const Proof& p, Rel rel) {
  if (!p || p->rel == rel) return p;
  auto copy = std::make_shared<ProofNode>(*p);
  copy->rel = rel;
  return copy;
}

VarSet with(VarSet X, const Var& z) {
  X.insert(z);
  return X;
}

// Every basic-then-accessible target of an argument: pairs (w, u) with t_i |>=b w |>=acc u.
struct SubStep {
  Term w, u;
};

std::vector<SubStep> subterm_steps(const Term& ti, const OrderParams& params, bool require_nv) {
  std::vector<SubStep> out;
  std::vector<Term> ws{ti};
  for (auto& w : bsubt_candidates(ti, require_nv))
    if (params.is_basic(w.type().name())) ws.push_back(std::move(w));
  std::unordered_set<Term, TermHash> seen;
  for (const auto& w : ws) {
    if (seen.insert(w).second) out.push_back({w, w});
    for (auto& u : asubt_targets(w, params))
      if (seen.insert(u).second) out.push_back({w, u});
  }
  return out;
}

}  // namespace

Var judgment_fresh(const Term& s, const Term& t, const VarSet& X, const Type& type) {
  int top = std::max(s.max_fresh(), t.max_fresh());
  for (const auto& x : X) top = std::max(top, x.fresh);
  return Var{"z", top + 1, type};
}

std::size_t OrderEngine::KeyHash::operator()(const Key& k) const {
  std::size_t h = hash_mix(k.s.hash(), k.t.hash());
  for (const auto& x : k.X) h = hash_mix(h, x.hash());
  return h;
}

OrderEngine::OrderEngine(OrderParams params, EngineOptions options)
    : params_(std::move(params)), options_(options) {}

void OrderEngine::check_input(const Term& s, const Term& t) const {
  if (options_.mode != Mode::Normal) return;
  if (!is_beta_eta_normal(s)) throw TypeError("left-hand side is not beta-eta normal: " + to_string(s));
  if (!is_beta_eta_normal(t)) throw TypeError("right-hand side is not beta-eta normal: " + to_string(t));
}

Proof OrderEngine::gt(const Term& s, const Term& t, const VarSet& X) {
  check_input(s, t);
  return strict(s, t, X);
}
Proof OrderEngine::gt_tau(const Term& s, const Term& t, const VarSet& X) {
  check_input(s, t);
  return strict_tau(s, t, X);
}
Proof OrderEngine::ge(const Term& s, const Term& t, const VarSet& X) {
  check_input(s, t);
  return weak(s, t, X);
}
Proof OrderEngine::ge_tau(const Term& s, const Term& t, const VarSet& X) {
  check_input(s, t);
  return weak_tau(s, t, X);
}
Proof OrderEngine::orient(const Rule& r) { return gt(r.lhs, r.rhs, {}); }

bool OrderEngine::nonversatile_ok(const Term& s) const {
  return options_.mode == Mode::Plain || is_nonversatile_unchecked(s);
}

Proof OrderEngine::strict(const Term& s, const Term& t, const VarSet& X) {
  if (!nonversatile_ok(s)) return nullptr;
  Key key{s, t, X};
  if (auto it = memo_.find(key); it != memo_.end()) {
    ++stats_.memo_hits;
    return it->second;
  }
  if (!active_.insert(key).second)
    throw std::logic_error("judgment repeats on its own proof path: " + to_string(s) + " > " + to_string(t));
  struct Release {
    std::unordered_set<Key, KeyHash>& set;
    const Key& key;
    ~Release() { set.erase(key); }
  } release{active_, key};
  ++stats_.judgments;
  if (options_.budget && stats_.judgments > options_.budget)
    throw BudgetExceeded("more than " + std::to_string(options_.budget) + " judgments");
  Proof p = search(s, t, X);
  memo_.emplace(key, p);
  return p;
}

Proof OrderEngine::strict_tau(const Term& s, const Term& t, const VarSet& X) {
  if (!type_ge(params_.levels, s.type(), t.type())) return nullptr;
  return retag(strict(s, t, X), Rel::GtTau);
}

namespace {

Proof refl(const Term& s, const VarSet& X, Rel rel, Mode mode) {
  auto n = std::make_shared<ProofNode>();
  n->rule = "=";
  n->rel = rel;
  n->mode = mode;
  n->lhs = s;
  n->rhs = s;
  n->X = X;
  return n;
}

}  // namespace

Proof OrderEngine::weak(const Term& s, const Term& t, const VarSet& X) {
  if (s == t) return refl(s, X, Rel::Ge, options_.mode);
  return strict(s, t, X);
}

Proof OrderEngine::weak_tau(const Term& s, const Term& t, const VarSet& X) {
  if (s == t) return refl(s, X, Rel::GeTau, options_.mode);
  return strict_tau(s, t, X);
}

namespace {

std::shared_ptr<ProofNode> node(const std::string& rule, const Term& s, const Term& t, const VarSet& X, Mode mode,
                                std::vector<Proof> children = {}) {
  auto n = std::make_shared<ProofNode>();
  n->rule = rule;
  n->mode = mode;
  n->lhs = s;
  n->rhs = t;
  n->X = X;
  n->children = std::move(children);
  return n;
}

}  // namespace

Proof OrderEngine::search(const Term& s, const Term& t, const VarSet& X) {
  Proof p;
  if (options_.mode == Mode::Plain && (p = plain_rules(s, t, X))) return p;
  switch (s.kind()) {
    case Term::Kind::Fun:
      p = params_.is_big(s.symbol()->name) ? big_rules(s, t, X) : small_rules(s, t, X);
      break;
    case Term::Kind::App:
      p = app_rules(s, t, X);
      break;
    case Term::Kind::Lam:
      p = lam_rules(s, t, X);
      break;
    default:
      break;
  }
  return p;
}

// ---------------------------------------------------------------------------
// big symbols

Proof OrderEngine::big_rules(const Term& s, const Term& t, const VarSet& X) {
  Mode mode = options_.mode;
  if (is_x(t, X)) return node("FbV", s, t, X, mode);
  const auto& ts = s.args();
  for (std::size_t i = 0; i < ts.size(); ++i)
    if (ts[i] == t) {
      auto n = node("Fb⊳", s, t, X, mode, {refl(t, {}, Rel::GeTau, mode)});
      n->index = static_cast<int>(i) + 1;
      n->via_b = t;
      n->via_acc = t;
      return n;
    }
  const std::string& f = s.symbol()->name;
  if (t.is_fun()) {
    const std::string& g = t.symbol()->name;
    if (params_.prec_gt(f, g)) {
      std::vector<Proof> kids;
      for (const auto& u : t.args()) {
        Proof k = strict(s, u, X);
        if (!k) {
          kids.clear();
          break;
        }
        kids.push_back(k);
      }
      if (kids.size() == t.args().size()) return node("Fb≻", s, t, X, mode, std::move(kids));
    } else if (params_.prec_eq(f, g)) {
      if (Proof p = big_equal(s, t, X)) return p;
    }
  } else if (t.is_app()) {
    Proof a = strict(s, t.fun(), X);
    Proof b = a ? strict(s, t.arg(), X) : nullptr;
    if (a && b) return node("Fb@", s, t, X, mode, {a, b});
  } else if (t.is_lam()) {
    Var z = judgment_fresh(s, t, X, t.binder_type());
    if (Proof k = strict(s, open_with(t, z), with(X, z))) {
      auto n = node("Fbλ", s, t, X, mode, {k});
      n->fresh = z;
      return n;
    }
  }
  return big_subterm(s, t, X);
}

Proof OrderEngine::big_subterm(const Term& s, const Term& t, const VarSet& X) {
  const auto& ts = s.args();
  bool nv = options_.mode == Mode::Normal;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    for (const auto& st : subterm_steps(ts[i], params_, nv)) {
      if (Proof k = weak_tau(st.u, t, {})) {
        auto n = node("Fb⊳", s, t, X, options_.mode, {k});
        n->index = static_cast<int>(i) + 1;
        n->via_b = st.w;
        n->via_acc = st.u;
        return n;
      }
    }
  }
  return nullptr;
}

Proof OrderEngine::arg_dominates(const Term& ti, const Term& uj, const VarSet& X, bool with_struct) {
  if (Proof p = strict_tau(ti, uj, {})) return p;
  if (!with_struct) return nullptr;
  for (const auto& c : structsm_candidates(ti, X)) {
    if (!acc_path_enabled(c.path, params_)) continue;
    if (options_.mode == Mode::Normal && !is_beta_eta_normal(c.witness)) continue;
    if (Proof k = weak_tau(c.witness, uj, {})) {
      auto n = node("≫", ti, uj, X, options_.mode, {k});
      n->rel = Rel::Struct;
      n->witness = c.witness;
      return n;
    }
  }
  return nullptr;
}

namespace {

// Lazily evaluated argument-dominance table for one extension comparison.
struct DomTable {
  std::size_t m;
  std::vector<int> state;  // 0 unknown, 1 yes, 2 no
  std::vector<Proof> proofs;
  DomTable(std::size_t n, std::size_t m) : m(m), state(n * m, 0), proofs(n * m) {}
  template <class F>
  bool get(std::size_t i, std::size_t j, F&& compute) {
    std::size_t k = i * m + j;
    if (!state[k]) {
      proofs[k] = compute(i, j);
      state[k] = proofs[k] ? 1 : 2;
    }
    return state[k] == 1;
  }
};

}  // namespace

Proof OrderEngine::big_equal(const Term& s, const Term& t, const VarSet& X) {
  const auto& ts = s.args();
  const auto& us = t.args();
  Mode mode = options_.mode;
  Status st = params_.status_of(s.symbol()->name);
  DomTable table(ts.size(), us.size());
  auto compute = [&](std::size_t i, std::size_t j) { return arg_dominates(ts[i], us[j], X, true); };
  auto eq = [&](std::size_t i, std::size_t j) { return ts[i] == us[j]; };
  auto dom = [&](std::size_t i, std::size_t j) { return table.get(i, j, compute); };

  std::vector<Proof> pre;
  if (!options_.optimized_feq) {
    for (const auto& u : us) {
      Proof k = strict(s, u, X);
      if (!k) return nullptr;
      pre.push_back(k);
    }
  }
  if (st == Status::Mul) {
    auto w = mul_extension(ts.size(), us.size(), eq, dom);
    if (!w) return nullptr;
    auto n = node(options_.optimized_feq ? "Fb=mul" : "Fb=", s, t, X, mode, pre);
    for (int y : w->removed) n->removed.push_back(y + 1);
    for (std::size_t j = 0; j < us.size(); ++j) {
      int a = w->assign[j];
      if (a >= 0) {
        n->assign.push_back(a + 1);
      } else {
        n->assign.push_back(a);
        n->children.push_back(table.proofs[static_cast<std::size_t>(-a - 1) * us.size() + j]);
      }
    }
    return n;
  }
  for (int i : lex_candidates(ts.size(), us.size(), eq, dom)) {
    std::vector<Proof> kids = pre;
    kids.push_back(table.proofs[static_cast<std::size_t>(i) * us.size() + static_cast<std::size_t>(i)]);
    if (options_.optimized_feq) {
      bool ok = true;
      for (std::size_t j = static_cast<std::size_t>(i) + 1; j < us.size() && ok; ++j) {
        Proof k = strict(s, us[j], X);
        ok = k != nullptr;
        if (ok) kids.push_back(k);
      }
      if (!ok) continue;
    }
    auto n = node(options_.optimized_feq ? "Fb=lex" : "Fb=", s, t, X, mode, std::move(kids));
    n->index = i + 1;
    return n;
  }
  return nullptr;
}

// ---------------------------------------------------------------------------
// small symbols

Proof OrderEngine::small_rules(const Term& s, const Term& t, const VarSet& X) {
  Mode mode = options_.mode;
  if (is_x(t, X)) return node("FsV", s, t, X, mode);
  const auto& ts = s.args();
  for (std::size_t i = 0; i < ts.size(); ++i)
    if (Proof k = weak_tau(ts[i], t, {})) {
      auto n = node("Fs⊳", s, t, X, mode, {k});
      n->index = static_cast<int>(i) + 1;
      return n;
    }
  const std::string& f = s.symbol()->name;
  if (t.is_fun()) {
    const std::string& g = t.symbol()->name;
    if (!params_.prec_gt(f, g) && !params_.prec_eq(f, g)) return nullptr;
    std::vector<Proof> kids;
    for (const auto& u : t.args()) {
      Proof k = strict_tau(s, u, X);
      if (!k) return nullptr;
      kids.push_back(k);
    }
    if (params_.prec_gt(f, g)) return node("Fs≻", s, t, X, mode, std::move(kids));
    return small_equal(s, t, X);
  }
  if (t.is_app()) {
    Proof a = strict_tau(s, t.fun(), X);
    Proof b = a ? strict_tau(s, t.arg(), X) : nullptr;
    if (a && b) return node("Fs@", s, t, X, mode, {a, b});
  }
  return nullptr;
}

Proof OrderEngine::small_equal(const Term& s, const Term& t, const VarSet& X) {
  const auto& ts = s.args();
  const auto& us = t.args();
  bool with_struct = options_.mode == Mode::Plain;
  std::vector<Proof> kids;
  for (const auto& u : us) kids.push_back(strict_tau(s, u, X));
  DomTable table(ts.size(), us.size());
  auto compute = [&](std::size_t i, std::size_t j) { return arg_dominates(ts[i], us[j], X, with_struct); };
  auto eq = [&](std::size_t i, std::size_t j) { return ts[i] == us[j]; };
  auto dom = [&](std::size_t i, std::size_t j) { return table.get(i, j, compute); };
  if (params_.status_of(s.symbol()->name) == Status::Mul) {
    auto w = mul_extension(ts.size(), us.size(), eq, dom);
    if (!w) return nullptr;
    auto n = node("Fs=", s, t, X, options_.mode, std::move(kids));
    for (int y : w->removed) n->removed.push_back(y + 1);
    for (std::size_t j = 0; j < us.size(); ++j) {
      int a = w->assign[j];
      n->assign.push_back(a >= 0 ? a + 1 : a);
      if (a < 0) n->children.push_back(table.proofs[static_cast<std::size_t>(-a - 1) * us.size() + j]);
    }
    return n;
  }
  auto cands = lex_candidates(ts.size(), us.size(), eq, dom);
  if (cands.empty()) return nullptr;
  int i = cands.front();
  kids.push_back(table.proofs[static_cast<std::size_t>(i) * us.size() + static_cast<std::size_t>(i)]);
  auto n = node("Fs=", s, t, X, options_.mode, std::move(kids));
  n->index = i + 1;
  return n;
}

// ---------------------------------------------------------------------------
// applications

Proof OrderEngine::app_helper(const Term& s, const Term& w, const VarSet& X) {
  Proof k;
  int variant = 0;
  if ((k = strict_tau(s.fun(), w, X)))
    variant = 1;
  else if ((k = weak_tau(s.arg(), w, X)))
    variant = 2;
  else if ((k = strict_tau(s, w, X)))
    variant = 3;
  if (!k) return nullptr;
  auto n = node("@>", s, w, X, options_.mode, {k});
  n->rel = Rel::AppHelper;
  n->index = variant;
  return n;
}

Proof OrderEngine::app_rules(const Term& s, const Term& t, const VarSet& X) {
  Mode mode = options_.mode;
  if (is_x(t, X)) return node("@V", s, t, X, mode);
  if (Proof k = weak(s.fun(), t, X)) {
    auto n = node("@⊳", s, t, X, mode, {k});
    n->index = 1;
    return n;
  }
  if (Proof k = weak_tau(s.arg(), t, X)) {
    auto n = node("@⊳", s, t, X, mode, {k});
    n->index = 2;
    return n;
  }
  if (t.is_app()) {
    if (s.fun() == t.fun())
      if (Proof k = strict(s.arg(), t.arg(), X)) {
        auto n = node("@=", s, t, X, mode, {k});
        n->index = 1;
        return n;
      }
    Proof a = app_helper(s, t.fun(), X);
    Proof b = a ? app_helper(s, t.arg(), X) : nullptr;
    if (a && b) {
      auto n = node("@=", s, t, X, mode, {a, b});
      n->index = 2;
      return n;
    }
  } else if (t.is_lam()) {
    Var z = judgment_fresh(s, t, X, t.binder_type());
    if (Proof k = strict(s, open_with(t, z), X)) {
      auto n = node("@λ", s, t, X, mode, {k});
      n->fresh = z;
      return n;
    }
  } else if (t.is_fun() && !params_.is_big(t.symbol()->name)) {
    std::vector<Proof> kids;
    for (const auto& v : t.args()) {
      Proof k = strict_tau(s, v, X);
      if (!k) return nullptr;
      kids.push_back(k);
    }
    return node("@Fs", s, t, X, mode, std::move(kids));
  }
  return nullptr;
}

// ---------------------------------------------------------------------------
// abstractions

Proof OrderEngine::lam_rules(const Term& s, const Term& t, const VarSet& X) {
  Mode mode = options_.mode;
  if (is_x(t, X)) return node("λV", s, t, X, mode);
  Var z = judgment_fresh(s, t, X, s.binder_type());
  Term body = open_with(s, z);
  if (Proof k = weak_tau(body, t, X)) {
    auto n = node("λ⊳", s, t, X, mode, {k});
    n->fresh = z;
    return n;
  }
  // plain mode keeps it too: it is λ= followed by λη, so ⊐⁺ does not grow
  if (!t.is_lam() && t.type().is_arrow() && t.type().domain() == s.binder_type()) {
    if (Proof k = weak_tau(body, Term::app(t, Term::var(z)), X)) {
      auto n = node("λ⊳η", s, t, X, mode, {k});
      n->fresh = z;
      return n;
    }
  }
  if (t.is_lam()) {
    if (t.binder_type() == s.binder_type()) {
      if (Proof k = strict(body, open_with(t, z), X)) {
        auto n = node("λ=", s, t, X, mode, {k});
        n->fresh = z;
        return n;
      }
    } else {
      Var y = judgment_fresh(s, t, X, t.binder_type());
      if (Proof k = strict(s, open_with(t, y), X)) {
        auto n = node("λ≠", s, t, X, mode, {k});
        n->fresh = y;
        return n;
      }
    }
  } else if (t.is_fun() && !params_.is_big(t.symbol()->name)) {
    std::vector<Proof> kids;
    for (const auto& v : t.args()) {
      Proof k = strict_tau(s, v, X);
      if (!k) return nullptr;
      kids.push_back(k);
    }
    return node("λFs", s, t, X, mode, std::move(kids));
  }
  return nullptr;
}

// ---------------------------------------------------------------------------
// plain mode: beta and eta

Proof OrderEngine::plain_rules(const Term& s, const Term& t, const VarSet& X) {
  if (s.is_app() && s.fun().is_lam()) {
    if (Proof k = weak(instantiate(s.fun().body(), s.arg()), t, X)) return node("@β", s, t, X, Mode::Plain, {k});
  }
  if (s.is_lam() && s.body().is_app() && s.body().arg().is_bound() && s.body().arg().index() == 0 &&
      !has_loose_index(s.body().fun(), 0)) {
    if (Proof k = weak(shift(s.body().fun(), -1), t, X)) return node("λη", s, t, X, Mode::Plain, {k});
  }
  return nullptr;
}

// ---------------------------------------------------------------------------
// entry points

Proof ncpo_gt(const Term& s, const Term& t, const VarSet& X, const OrderParams& params, EngineOptions options) {
  options.mode = Mode::Normal;
  return OrderEngine(params, options).gt(s, t, X);
}

Proof ncpo_gt_tau(const Term& s, const Term& t, const VarSet& X, const OrderParams& params,
                  EngineOptions options) {
  options.mode = Mode::Normal;
  return OrderEngine(params, options).gt_tau(s, t, X);
}

Proof cpo_gt(const Term& s, const Term& t, const VarSet& X, const OrderParams& params, EngineOptions options) {
  options.mode = Mode::Plain;
  return OrderEngine(params, options).gt(s, t, X);
}

Proof orient_rule(const Rule& r, const OrderParams& params, EngineOptions options) {
  return OrderEngine(params, options).orient(r);
}

// ---------------------------------------------------------------------------
// printing

std::string rel_symbol(Rel rel, Mode mode) {
  bool plain = mode == Mode::Plain;
  switch (rel) {
    case Rel::Gt:
      return plain ? "⊐" : ">";
    case Rel::GtTau:
      return plain ? "⊐τ" : ">τ";
    case Rel::Ge:
      return plain ? "⊒" : "≥";
    case Rel::GeTau:
      return plain ? "⊒τ" : "≥τ";
    case Rel::AppHelper:
      return plain ? "⊐@" : ">@";
    case Rel::Struct:
      return plain ? "≫·⊒τ" : "≫·≥τ";
  }
  return "?";
}

namespace {

std::string format_vars(const VarSet& X) {
  std::string out = "{";
  bool first = true;
  for (const auto& x : X) {
    out += first ? "" : ", ";
    out += x.str();
    first = false;
  }
  return out + "}";
}

std::string witness_note(const ProofNode& n) {
  std::vector<std::string> parts;
  if (n.index) parts.push_back("i = " + std::to_string(n.index));
  if (n.via_b && !(n.lhs.is_fun() && n.index && *n.via_b == n.lhs.args()[n.index - 1]))
    parts.push_back("basic " + to_string(*n.via_b));
  if (n.via_acc && n.via_b && !(*n.via_acc == *n.via_b)) parts.push_back("accessible " + to_string(*n.via_acc));
  if (n.witness) parts.push_back("via " + to_string(*n.witness));
  if (n.fresh) parts.push_back("fresh " + n.fresh->str());
  if (!n.removed.empty()) {
    std::string r = "removed {";
    for (std::size_t k = 0; k < n.removed.size(); ++k) r += (k ? ", " : "") + std::to_string(n.removed[k]);
    parts.push_back(r + "}");
  }
  if (parts.empty()) return "";
  std::string out = "  (";
  for (std::size_t k = 0; k < parts.size(); ++k) out += (k ? "; " : "") + parts[k];
  return out + ")";
}

void format_into(const Proof& p, int depth, std::ostringstream& os) {
  os << std::string(2 * depth, ' ') << p->rule << " " << to_string(p->lhs) << " " << rel_symbol(p->rel, p->mode)
     << " " << to_string(p->rhs) << " [X = " << format_vars(p->X) << "]" << witness_note(*p) << "\n";
  for (const auto& c : p->children) format_into(c, depth + 1, os);
}

}  // namespace

std::string format_trace(const Proof& p) {
  if (!p) return "";
  std::ostringstream os;
  format_into(p, 0, os);
  return os.str();
}

std::size_t trace_size(const Proof& p) {
  if (!p) return 0;
  std::size_t n = 1;
  for (const auto& c : p->children) n += trace_size(c);
  return n;
}

std::vector<std::string> trace_rules(const Proof& p) {
  std::vector<std::string> out;
  if (!p) return out;
  out.push_back(p->rule);
  for (const auto& c : p->children) {
    auto sub = trace_rules(c);
    out.insert(out.end(), sub.begin(), sub.end());
  }
  return out;
}

// ---------------------------------------------------------------------------
// replay

namespace {

class Checker {
 public:
  Checker(const OrderParams& params, const EngineOptions& options) : P(params), O(options) {}

  void judgment(const Proof& p, Rel rel, const Term& s, const Term& t, const VarSet& X) {
    if (!p) fail("missing premise", s, t);
    if (!(p->lhs == s) || !(p->rhs == t) || p->X != X)
      fail("premise proves " + to_string(p->lhs) + " / " + to_string(p->rhs) + " instead", s, t);
    if (p->mode != O.mode) fail("proof node from the other mode", s, t);
    switch (rel) {
      case Rel::Ge:
      case Rel::GeTau:
        if (p->rule == "=") {
          if (!(s == t)) fail("reflexivity on distinct terms", s, t);
          if (rel == Rel::GeTau) type_check(s, t);
          return;
        }
        [[fallthrough]];
      case Rel::Gt:
      case Rel::GtTau:
        if (rel == Rel::GtTau || rel == Rel::GeTau) type_check(s, t);
        strict(p);
        return;
      case Rel::AppHelper:
        app_helper(p);
        return;
      case Rel::Struct:
        structural(p);
        return;
    }
  }

 private:
  const OrderParams& P;
  const EngineOptions& O;
  std::unordered_set<const ProofNode*> done_;

  [[noreturn]] void fail(const std::string& why, const Term& s, const Term& t) {
    throw TraceError(why + " at " + to_string(s) + " , " + to_string(t));
  }
  void require(bool ok, const std::string& why, const Term& s, const Term& t) {
    if (!ok) fail(why, s, t);
  }
  void type_check(const Term& s, const Term& t) {
    require(type_ge(P.levels, s.type(), t.type()), "type of the left side does not dominate", s, t);
  }
  void arity(const Proof& p, std::size_t n) {
    require(p->children.size() == n, "wrong number of premises for " + p->rule, p->lhs, p->rhs);
  }
  bool normal() const { return O.mode == Mode::Normal; }
  bool big(const Term& s) const { return s.is_fun() && P.is_big(s.symbol()->name); }
  bool small(const Term& s) const { return s.is_fun() && !P.is_big(s.symbol()->name); }

  Var fresh_var(const Proof& p, const Type& type) {
    require(p->fresh.has_value(), "missing fresh variable", p->lhs, p->rhs);
    const Var& z = *p->fresh;
    require(z.type == type, "fresh variable has the wrong type", p->lhs, p->rhs);
    require(!occurs_free(p->lhs, z) && !occurs_free(p->rhs, z) && !p->X.count(z), "variable is not fresh", p->lhs,
            p->rhs);
    return z;
  }

  void strict(const Proof& p) {
    if (done_.count(p.get())) return;
    const Term& s = p->lhs;
    const Term& t = p->rhs;
    const VarSet& X = p->X;
    if (normal()) {
      require(is_beta_eta_normal(s) && is_beta_eta_normal(t), "judgment on non-normal terms", s, t);
      require(is_nonversatile_unchecked(s), "left side is versatile", s, t);
    }
    const std::string& r = p->rule;
    const auto& kids = p->children;
    if (r == "FbV" || r == "FsV" || r == "@V" || r == "λV") {
      require(t.is_var() && X.count(t.var()), "right side is not a marked variable", s, t);
      require((r == "FbV" && big(s)) || (r == "FsV" && small(s)) || (r == "@V" && s.is_app()) ||
                  (r == "λV" && s.is_lam()),
              "wrong left side for " + r, s, t);
      arity(p, 0);
    } else if (r == "Fb⊳") {
      require(big(s), "not a big symbol", s, t);
      require(p->index >= 1 && p->index <= static_cast<int>(s.args().size()), "bad argument index", s, t);
      require(p->via_b && p->via_acc, "missing subterm witnesses", s, t);
      const Term& ti = s.args()[p->index - 1];
      const Term& w = *p->via_b;
      const Term& u = *p->via_acc;
      if (!(w == ti)) {
        auto c = bsubt_candidates(ti, normal());
        require(std::find(c.begin(), c.end(), w) != c.end() && P.is_basic(w.type().name()), "not a basic subterm",
                s, t);
      }
      if (!(u == w)) {
        auto c = asubt_targets(w, P);
        require(std::find(c.begin(), c.end(), u) != c.end(), "not an accessible subterm", s, t);
      }
      arity(p, 1);
      judgment(kids[0], Rel::GeTau, u, t, {});
    } else if (r == "Fs⊳") {
      require(small(s), "not a small symbol", s, t);
      require(p->index >= 1 && p->index <= static_cast<int>(s.args().size()), "bad argument index", s, t);
      arity(p, 1);
      judgment(kids[0], Rel::GeTau, s.args()[p->index - 1], t, {});
    } else if (r == "Fb≻" || r == "Fs≻") {
      require(r == "Fb≻" ? big(s) : small(s), "wrong symbol kind", s, t);
      require(t.is_fun() && P.prec_gt(s.symbol()->name, t.symbol()->name), "precedence does not decrease", s, t);
      arity(p, t.args().size());
      for (std::size_t i = 0; i < kids.size(); ++i)
        judgment(kids[i], r == "Fb≻" ? Rel::Gt : Rel::GtTau, s, t.args()[i], X);
    } else if (r == "Fb=mul" || r == "Fb=lex" || r == "Fb=" || r == "Fs=") {
      equal_rule(p);
    } else if (r == "Fb@" || r == "Fs@") {
      require(r == "Fb@" ? big(s) : small(s), "wrong symbol kind", s, t);
      require(t.is_app(), "right side is not an application", s, t);
      arity(p, 2);
      Rel rel = r == "Fb@" ? Rel::Gt : Rel::GtTau;
      judgment(kids[0], rel, s, t.fun(), X);
      judgment(kids[1], rel, s, t.arg(), X);
    } else if (r == "Fbλ") {
      require(big(s) && t.is_lam(), "wrong shape for " + r, s, t);
      Var z = fresh_var(p, t.binder_type());
      arity(p, 1);
      VarSet X2 = X;
      X2.insert(z);
      judgment(kids[0], Rel::Gt, s, open_with(t, z), X2);
    } else if (r == "@⊳") {
      require(s.is_app(), "left side is not an application", s, t);
      arity(p, 1);
      require(p->index == 1 || p->index == 2, "bad premise variant", s, t);
      if (p->index == 1)
        judgment(kids[0], Rel::Ge, s.fun(), t, X);
      else
        judgment(kids[0], Rel::GeTau, s.arg(), t, X);
    } else if (r == "@=") {
      require(s.is_app() && t.is_app(), "wrong shape for " + r, s, t);
      if (p->index == 1) {
        require(s.fun() == t.fun(), "heads differ", s, t);
        arity(p, 1);
        judgment(kids[0], Rel::Gt, s.arg(), t.arg(), X);
      } else {
        require(p->index == 2, "bad premise variant", s, t);
        arity(p, 2);
        judgment(kids[0], Rel::AppHelper, s, t.fun(), X);
        judgment(kids[1], Rel::AppHelper, s, t.arg(), X);
      }
    } else if (r == "@λ") {
      require(s.is_app() && t.is_lam(), "wrong shape for " + r, s, t);
      Var z = fresh_var(p, t.binder_type());
      arity(p, 1);
      judgment(kids[0], Rel::Gt, s, open_with(t, z), X);
    } else if (r == "@Fs" || r == "λFs") {
      require(r == "@Fs" ? s.is_app() : s.is_lam(), "wrong left side for " + r, s, t);
      require(small(t), "right side is not headed by a small symbol", s, t);
      arity(p, t.args().size());
      for (std::size_t i = 0; i < kids.size(); ++i) judgment(kids[i], Rel::GtTau, s, t.args()[i], X);
    } else if (r == "λ⊳") {
      require(s.is_lam(), "left side is not an abstraction", s, t);
      Var z = fresh_var(p, s.binder_type());
      arity(p, 1);
      judgment(kids[0], Rel::GeTau, open_with(s, z), t, X);
    } else if (r == "λ⊳η") {
      require(s.is_lam() && !t.is_lam() && t.type().is_arrow() && t.type().domain() == s.binder_type(),
              "wrong shape for " + r, s, t);
      Var z = fresh_var(p, s.binder_type());
      arity(p, 1);
      judgment(kids[0], Rel::GeTau, open_with(s, z), Term::app(t, Term::var(z)), X);
    } else if (r == "λ=") {
      require(s.is_lam() && t.is_lam() && s.binder_type() == t.binder_type(), "wrong shape for " + r, s, t);
      Var z = fresh_var(p, s.binder_type());
      arity(p, 1);
      judgment(kids[0], Rel::Gt, open_with(s, z), open_with(t, z), X);
    } else if (r == "λ≠") {
      require(s.is_lam() && t.is_lam() && !(s.binder_type() == t.binder_type()), "wrong shape for " + r, s, t);
      Var z = fresh_var(p, t.binder_type());
      arity(p, 1);
      judgment(kids[0], Rel::Gt, s, open_with(t, z), X);
    } else if (r == "@β") {
      require(!normal() && s.is_app() && s.fun().is_lam(), "wrong shape for " + r, s, t);
      arity(p, 1);
      judgment(kids[0], Rel::Ge, instantiate(s.fun().body(), s.arg()), t, X);
    } else if (r == "λη") {
      require(!normal() && s.is_lam() && s.body().is_app() && s.body().arg().is_bound() &&
                  s.body().arg().index() == 0 && !has_loose_index(s.body().fun(), 0),
              "wrong shape for " + r, s, t);
      arity(p, 1);
      judgment(kids[0], Rel::Ge, shift(s.body().fun(), -1), t, X);
    } else {
      fail("unknown rule " + r, s, t);
    }
    done_.insert(p.get());
  }

  // Premise t_i R u_j of an argument comparison.
  void dominance(const Proof& p, const Term& ti, const Term& uj, const VarSet& X, bool with_struct) {
    if (p && p->rel == Rel::Struct) {
      require(with_struct, "structural step not allowed here", ti, uj);
      judgment(p, Rel::Struct, ti, uj, X);
    } else {
      judgment(p, Rel::GtTau, ti, uj, {});
    }
  }

  void equal_rule(const Proof& p) {
    const Term& s = p->lhs;
    const Term& t = p->rhs;
    const VarSet& X = p->X;
    const std::string& r = p->rule;
    bool is_big = r != "Fs=";
    require(is_big ? big(s) : small(s), "wrong symbol kind", s, t);
    require(t.is_fun() && P.prec_eq(s.symbol()->name, t.symbol()->name), "precedences are not equal", s, t);
    Status st = P.status_of(s.symbol()->name);
    if (r == "Fb=mul" || r == "Fb=lex") {
      require(O.optimized_feq, "optimized rule used without the option", s, t);
      require((r == "Fb=mul") == (st == Status::Mul), "status does not match the rule", s, t);
    } else if (r == "Fb=") {
      require(!O.optimized_feq, "generic rule used with the optimized option", s, t);
    }
    bool with_struct = is_big || !normal();
    const auto& ts = s.args();
    const auto& us = t.args();
    std::size_t k = 0;
    const auto& kids = p->children;
    if (r == "Fb=" || r == "Fs=") {
      require(kids.size() >= us.size(), "missing premises", s, t);
      for (; k < us.size(); ++k) judgment(kids[k], is_big ? Rel::Gt : Rel::GtTau, s, us[k], X);
    }
    if (st == Status::Mul) {
      require(!p->removed.empty() && p->assign.size() == us.size(), "malformed multiset witness", s, t);
      std::vector<int> removed_count(ts.size(), 0), eq_count(ts.size(), 0);
      for (int y : p->removed) {
        require(y >= 1 && y <= static_cast<int>(ts.size()), "removed index out of range", s, t);
        ++removed_count[y - 1];
      }
      for (std::size_t j = 0; j < us.size(); ++j) {
        int a = p->assign[j];
        if (a > 0) {
          require(a <= static_cast<int>(ts.size()) && !removed_count[a - 1], "equality match on a removed element",
                  s, t);
          require(ts[a - 1] == us[j], "matched elements differ", s, t);
          ++eq_count[a - 1];
        } else {
          require(a < 0 && -a <= static_cast<int>(ts.size()) && removed_count[-a - 1], "dominating element is kept",
                  s, t);
          require(k < kids.size(), "missing premises", s, t);
          dominance(kids[k++], ts[-a - 1], us[j], X, with_struct);
        }
      }
      for (std::size_t i = 0; i < ts.size(); ++i)
        require(removed_count[i] + eq_count[i] == 1, "kept element not matched exactly once", s, t);
    } else {
      int i = p->index;
      require(i >= 1 && i <= static_cast<int>(std::min(ts.size(), us.size())), "bad lexicographic position", s, t);
      for (int j = 0; j + 1 < i; ++j) require(ts[j] == us[j], "prefix differs", s, t);
      require(k < kids.size(), "missing premises", s, t);
      dominance(kids[k++], ts[i - 1], us[i - 1], X, with_struct);
      if (r == "Fb=lex")
        for (std::size_t j = static_cast<std::size_t>(i); j < us.size(); ++j) {
          require(k < kids.size(), "missing premises", s, t);
          judgment(kids[k++], Rel::Gt, s, us[j], X);
        }
    }
    require(k == kids.size(), "surplus premises", s, t);
  }

  void app_helper(const Proof& p) {
    const Term& s = p->lhs;
    const Term& w = p->rhs;
    require(s.is_app() && p->children.size() == 1, "malformed application helper", s, w);
    switch (p->index) {
      case 1:
        judgment(p->children[0], Rel::GtTau, s.fun(), w, p->X);
        break;
      case 2:
        judgment(p->children[0], Rel::GeTau, s.arg(), w, p->X);
        break;
      case 3:
        judgment(p->children[0], Rel::GtTau, s, w, p->X);
        break;
      default:
        fail("bad helper variant", s, w);
    }
  }

  void structural(const Proof& p) {
    const Term& ti = p->lhs;
    const Term& uj = p->rhs;
    require(p->witness.has_value() && p->children.size() == 1, "malformed structural step", ti, uj);
    require(structsm(ti, *p->witness, p->X, P), "witness is not structurally smaller", ti, uj);
    judgment(p->children[0], Rel::GeTau, *p->witness, uj, {});
  }
};

}  // namespace

void check_trace(const Proof& p, const OrderParams& params, const EngineOptions& options) {
  if (!p) throw TraceError("empty proof");
  Checker c(params, options);
  c.judgment(p, p->rel, p->lhs, p->rhs, p->X);
}

bool trace_valid(const Proof& p, const OrderParams& params, const EngineOptions& options) {
  try {
    check_trace(p, params, options);
    return true;
  } catch (const TraceError&) {
    return false;
  }
}

}  // namespace hoterm

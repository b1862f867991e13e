#include "hoterm/structure.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <sstream>
#include <unordered_set>

namespace hoterm {

// ---------------------------------------------------------------------------
// parameters

OrderParams OrderParams::defaults(const Problem& p) {
  OrderParams o;
  for (const auto& b : p.base_types) {
    o.levels.set(b, 0);
    o.basic[b] = false;
  }
  for (const auto& s : p.symbols) {
    o.prec[s->name] = 0;
    o.status[s->name] = Status::Mul;
    o.big[s->name] = true;
  }
  return o;
}

int OrderParams::prec_of(const std::string& f) const {
  auto it = prec.find(f);
  return it == prec.end() ? 0 : it->second;
}
Status OrderParams::status_of(const std::string& f) const {
  auto it = status.find(f);
  return it == status.end() ? Status::Mul : it->second;
}
bool OrderParams::is_big(const std::string& f) const {
  auto it = big.find(f);
  return it == big.end() ? true : it->second;
}
const std::set<int>& OrderParams::acc_of(const std::string& f) const {
  static const std::set<int> none;
  auto it = acc.find(f);
  return it == acc.end() ? none : it->second;
}
bool OrderParams::is_basic(const std::string& base) const {
  auto it = basic.find(base);
  return it != basic.end() && it->second;
}

namespace {

bool parse_bool(const std::string& s, int line) {
  if (s == "true") return true;
  if (s == "false") return false;
  throw ParamsError("line " + std::to_string(line) + ": expected true or false, got '" + s + "'");
}

int parse_int(const std::string& s, int line) {
  try {
    std::size_t used = 0;
    int v = std::stoi(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw ParamsError("line " + std::to_string(line) + ": expected an integer, got '" + s + "'");
}

}  // namespace

OrderParams parse_params(const std::string& text, const Problem& p) {
  OrderParams o = OrderParams::defaults(p);
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (auto c = raw.find('%'); c != std::string::npos) raw.erase(c);
    std::istringstream ls(raw);
    std::vector<std::string> tok;
    for (std::string w; ls >> w;) tok.push_back(w);
    if (tok.empty()) continue;
    const std::string& kw = tok[0];
    auto need = [&](std::size_t n) {
      if (tok.size() != n)
        throw ParamsError("line " + std::to_string(line) + ": '" + kw + "' expects " + std::to_string(n - 1) +
                          " operands");
    };
    auto symbol = [&](const std::string& name) {
      if (!p.find_symbol(name)) throw ParamsError("line " + std::to_string(line) + ": unknown symbol " + name);
      return name;
    };
    auto base = [&](const std::string& name) {
      if (p.base_index(name) < 0) throw ParamsError("line " + std::to_string(line) + ": unknown base type " + name);
      return name;
    };
    if (kw == "level") {
      need(3);
      o.levels.set(base(tok[1]), parse_int(tok[2], line));
    } else if (kw == "prec") {
      need(3);
      o.prec[symbol(tok[1])] = parse_int(tok[2], line);
    } else if (kw == "status") {
      need(3);
      if (tok[2] != "mul" && tok[2] != "lex")
        throw ParamsError("line " + std::to_string(line) + ": status must be mul or lex");
      o.status[symbol(tok[1])] = tok[2] == "mul" ? Status::Mul : Status::Lex;
    } else if (kw == "big") {
      need(3);
      o.big[symbol(tok[1])] = parse_bool(tok[2], line);
    } else if (kw == "basic") {
      need(3);
      o.basic[base(tok[1])] = parse_bool(tok[2], line);
    } else if (kw == "acc") {
      if (tok.size() < 2) throw ParamsError("line " + std::to_string(line) + ": 'acc' expects a symbol");
      std::string rest;
      for (std::size_t i = 2; i < tok.size(); ++i) rest += tok[i];
      std::set<int> idx;
      std::stringstream rs(rest);
      for (std::string part; std::getline(rs, part, ',');)
        if (!part.empty()) idx.insert(parse_int(part, line));
      o.acc[symbol(tok[1])] = idx;
    } else {
      throw ParamsError("line " + std::to_string(line) + ": unknown keyword '" + kw + "'");
    }
  }
  return o;
}

OrderParams load_params_file(const std::string& path, const Problem& p) {
  std::ifstream in(path);
  if (!in) throw ParamsError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_params(ss.str(), p);
}

std::string format_params(const OrderParams& o, const Problem& p) {
  std::ostringstream os;
  for (const auto& b : p.base_types) os << "level " << b << " " << o.levels.level(b) << "\n";
  for (const auto& b : p.base_types) os << "basic " << b << " " << (o.is_basic(b) ? "true" : "false") << "\n";
  for (const auto& s : p.symbols) {
    const std::string& f = s->name;
    os << "prec " << f << " " << o.prec_of(f) << "\n";
    os << "status " << f << " " << (o.status_of(f) == Status::Mul ? "mul" : "lex") << "\n";
    os << "big " << f << " " << (o.is_big(f) ? "true" : "false") << "\n";
    const auto& acc = o.acc_of(f);
    if (!acc.empty()) {
      os << "acc " << f << " ";
      bool first = true;
      for (int i : acc) {
        os << (first ? "" : ",") << i;
        first = false;
      }
      os << "\n";
    }
  }
  return os.str();
}

std::vector<std::string> validate_params(const Problem& p, const OrderParams& o) {
  std::vector<std::string> v;
  for (const auto& b : p.base_types)
    if (!o.levels.contains(b)) v.push_back("no level for base type " + b);
  if (!v.empty()) return v;

  for (const auto& f : p.symbols)
    for (const auto& g : p.symbols) {
      if (f->id >= g->id) continue;
      if (o.prec_eq(f->name, g->name) && o.status_of(f->name) != o.status_of(g->name))
        v.push_back("equivalent symbols " + f->name + " and " + g->name + " have different status");
    }
  for (const auto& f : p.symbols)
    for (const auto& g : p.symbols)
      if (f != g && o.prec_of(f->name) >= o.prec_of(g->name) && o.is_big(g->name) && !o.is_big(f->name))
        v.push_back("small " + f->name + " is not below big " + g->name + " in the precedence");

  for (const auto& f : p.symbols) {
    auto args = f->type.arg_types();
    const std::string& a = f->type.result_base().name();
    for (int i : o.acc_of(f->name)) {
      if (i < 1 || i > static_cast<int>(args.size())) {
        v.push_back("accessible index " + std::to_string(i) + " out of range for " + f->name);
        continue;
      }
      const Type& Ti = args[i - 1];
      if (!base_dominates(o.levels, a, Ti, false))
        v.push_back("accessible argument " + std::to_string(i) + " of " + f->name + ": " + a +
                    " does not dominate " + Ti.str());
      auto of = pos_of(a, Ti);
      auto plus = pos_plus(Ti);
      if (!std::includes(plus.begin(), plus.end(), of.begin(), of.end()))
        v.push_back("accessible argument " + std::to_string(i) + " of " + f->name + ": " + a +
                    " occurs negatively in " + Ti.str());
    }
  }

  for (const auto& a : p.base_types) {
    if (!o.is_basic(a)) continue;
    for (const auto& b : p.base_types)
      if (base_gt(o.levels, a, b) && !o.is_basic(b))
        v.push_back("basic " + a + " is above non-basic " + b);
    for (const auto& f : p.symbols) {
      if (f->type.result_base().name() != a) continue;
      auto args = f->type.arg_types();
      for (int i : o.acc_of(f->name)) {
        if (i < 1 || i > static_cast<int>(args.size())) continue;
        const Type& Ti = args[i - 1];
        if (!(Ti == Type::base(a) || (Ti.is_base() && o.is_basic(Ti.name()))))
          v.push_back("basic " + a + ": accessible argument " + std::to_string(i) + " of " + f->name + " has type " +
                      Ti.str());
      }
    }
  }

  SposAnalysis spos;
  for (const auto& f : p.symbols) {
    if (o.is_big(f->name)) continue;
    auto args = f->type.arg_types();
    const std::string& a = f->type.result_base().name();
    int n = static_cast<int>(args.size());
    if (f->arity == n) {
      for (int i = 0; i < n; ++i) {
        if (!base_dominates(o.levels, a, args[i], false))
          v.push_back("small " + f->name + ": " + a + " does not dominate argument type " + args[i].str());
        if (!spos.spos(a, args[i]).empty())
          v.push_back("small " + f->name + ": argument " + std::to_string(i + 1) + " has nonempty SPos " +
                      format_positions(spos.spos(a, args[i])));
      }
    } else {
      if (!o.acc_of(f->name).empty()) v.push_back("small " + f->name + " with partial arity has accessible arguments");
      Type rest = f->type.drop_args(f->arity);
      for (int i = 0; i < f->arity; ++i) {
        if (!base_dominates(o.levels, a, args[i], false))
          v.push_back("small " + f->name + ": " + a + " does not dominate argument type " + args[i].str());
        if (!type_geqdot(o.levels, rest, args[i]))
          v.push_back("small " + f->name + ": " + rest.str() + " does not dominate argument type " + args[i].str());
      }
    }
  }
  return v;
}

// ---------------------------------------------------------------------------
// nonversatility

namespace {

bool apps_fun_headed(const Term& t) {
  switch (t.kind()) {
    case Term::Kind::Bound:
    case Term::Kind::Free:
      return true;
    case Term::Kind::Fun:
      return std::all_of(t.args().begin(), t.args().end(), apps_fun_headed);
    case Term::Kind::App:
      return spine(t).head.is_fun() && apps_fun_headed(t.fun()) && apps_fun_headed(t.arg());
    case Term::Kind::Lam:
      return apps_fun_headed(t.body());
  }
  return false;
}

}  // namespace

bool is_nonversatile_unchecked(const Term& t) {
  switch (t.kind()) {
    case Term::Kind::Bound:
    case Term::Kind::Free:
      return false;
    case Term::Kind::Fun:
      return true;
    case Term::Kind::App:
      return spine(t).head.is_fun();
    case Term::Kind::Lam: {
      const Term& u = t.body();
      if (u.is_app() && u.arg().is_bound() && u.arg().index() == 0) return apps_fun_headed(u);
      if (!(u.is_bound() || u.is_var() || is_nonversatile_unchecked(u))) return false;
      if (u.is_app() && (u.arg().is_app() || u.arg().is_lam())) return is_nonversatile_unchecked(u.arg());
      return true;
    }
  }
  return false;
}

bool is_nonversatile(const Term& t) {
  if (!is_beta_eta_normal(t)) throw TypeError("nonversatility is only defined on normal forms: " + to_string(t));
  return is_nonversatile_unchecked(t);
}

// ---------------------------------------------------------------------------
// basic subterms

namespace {

std::vector<Term> children(const Term& t) {
  switch (t.kind()) {
    case Term::Kind::Fun:
      return t.args();
    case Term::Kind::App:
      return {t.fun(), t.arg()};
    case Term::Kind::Lam:
      return {t.body()};
    default:
      return {};
  }
}

void bsubt_walk(const Term& n, bool nv, std::vector<Term>& out, std::unordered_set<Term, TermHash>& seen) {
  for (const auto& c : children(n)) {
    if (c.loose() == 0 && c.type().is_base() && seen.insert(c).second) out.push_back(c);
    bool pass = c.is_fun() || ((c.is_app() || c.is_lam()) && (!nv || is_nonversatile_unchecked(c)));
    if (pass) bsubt_walk(c, nv, out, seen);
  }
}

}  // namespace

std::vector<Term> bsubt_candidates(const Term& s, bool require_nonversatile) {
  std::vector<Term> out;
  if (require_nonversatile && !is_nonversatile_unchecked(s)) return out;
  std::unordered_set<Term, TermHash> seen;
  bsubt_walk(s, require_nonversatile, out, seen);
  return out;
}

std::vector<Term> bsubt_targets(const Term& s, const OrderParams& params, bool require_nonversatile) {
  if (require_nonversatile && !is_nonversatile(s))
    throw TypeError("basic subterms are only taken of nonversatile terms: " + to_string(s));
  std::vector<Term> out;
  for (auto& t : bsubt_candidates(s, require_nonversatile))
    if (params.is_basic(t.type().name())) out.push_back(std::move(t));
  return out;
}

// ---------------------------------------------------------------------------
// accessible subterms

std::vector<AccCandidate> asubt_candidates(const Term& s) {
  std::vector<AccCandidate> out;
  if (!s.type().is_base()) return out;
  Spine sp = spine(s);
  if (!sp.head.is_fun()) return out;
  std::vector<Term> all = sp.head.args();
  all.insert(all.end(), sp.args.begin(), sp.args.end());
  const Symbol& f = sp.head.symbol();
  for (std::size_t j = 0; j < all.size(); ++j) {
    AccStep step{f, static_cast<int>(j) + 1};
    out.push_back({all[j], {step}});
    for (auto& deeper : asubt_candidates(all[j])) {
      deeper.path.insert(deeper.path.begin(), step);
      out.push_back(std::move(deeper));
    }
  }
  return out;
}

bool acc_path_enabled(const std::vector<AccStep>& path, const OrderParams& params) {
  for (const auto& st : path)
    if (!params.acc_of(st.f->name).count(st.index)) return false;
  return true;
}

std::vector<Term> asubt_targets(const Term& s, const OrderParams& params) {
  std::vector<Term> out;
  std::unordered_set<Term, TermHash> seen;
  for (const auto& c : asubt_candidates(s))
    if (acc_path_enabled(c.path, params) && seen.insert(c.target).second) out.push_back(c.target);
  return out;
}

// ---------------------------------------------------------------------------
// structurally smaller

bool structsm_allows_empty_spine() {
#ifdef HOTERM_STRICT_SPINE
  return false;
#else
  return true;
#endif
}

std::vector<StructCandidate> structsm_candidates(const Term& s, const VarSet& X) {
  std::vector<StructCandidate> out;
  if (!s.type().is_base()) return out;
  const std::string& a = s.type().name();
  for (const auto& c : asubt_candidates(s)) {
    const Type& tu = c.target.type();
    if (tu.result_base().name() != a) continue;
    auto need = tu.arg_types();
    if (need.empty() && !structsm_allows_empty_spine()) continue;
    std::vector<std::vector<Var>> choices;
    bool possible = true;
    for (const auto& T : need) {
      std::vector<Var> xs;
      if (pos_of(a, T).empty())
        for (const auto& x : X)
          if (x.type == T) xs.push_back(x);
      if (xs.empty()) possible = false;
      choices.push_back(std::move(xs));
    }
    if (!possible) continue;
    std::vector<Var> pick;
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
      if (i == choices.size()) {
        std::vector<Term> args;
        for (const auto& x : pick) args.push_back(Term::var(x));
        out.push_back({Term::apps(c.target, args), c.path, pick});
        return;
      }
      for (const auto& x : choices[i]) {
        pick.push_back(x);
        rec(i + 1);
        pick.pop_back();
      }
    };
    rec(0);
  }
  return out;
}

bool structsm(const Term& s, const Term& t, const VarSet& X, const OrderParams& params) {
  for (const auto& c : structsm_candidates(s, X))
    if (c.witness == t && acc_path_enabled(c.path, params)) return true;
  return false;
}

}  // namespace hoterm

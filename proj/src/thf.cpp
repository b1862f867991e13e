#include "hoterm/thf.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <memory>
#include <set>
#include <sstream>

namespace hoterm {

Symbol Problem::find_symbol(const std::string& name) const {
  for (const auto& s : symbols)
    if (s->name == name) return s;
  return nullptr;
}

int Problem::base_index(const std::string& name) const {
  for (std::size_t i = 0; i < base_types.size(); ++i)
    if (base_types[i] == name) return static_cast<int>(i);
  return -1;
}

ParseError::ParseError(Kind kind, int line, int col, const std::string& msg)
    : std::runtime_error("line " + std::to_string(line) + ":" + std::to_string(col) + ": " + msg),
      kind_(kind),
      line_(line),
      col_(col) {}

namespace {

std::string join_issues(const std::vector<std::string>& v) {
  std::string s = "invalid rewrite rules:";
  for (const auto& i : v) s += "\n  " + i;
  return s;
}

}  // namespace

ValidationError::ValidationError(std::vector<std::string> issues)
    : std::runtime_error(join_issues(issues)), issues_(std::move(issues)) {}

namespace {

// ---------------------------------------------------------------------------
// lexer

enum class Tok {
  LParen, RParen, LBrack, RBrack, Comma, Colon, Dot, At, Eq, Neq, Bang, Question, Caret, Gt,
  Amp, Pipe, Tilde, Implies, Iff, Lower, Upper, Dollar, Quoted, Number, End
};

struct Token {
  Tok kind;
  std::string text;
  int line, col;
};

std::vector<Token> lex(const std::string& s) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto adv = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < s.size(); ++k, ++i) {
      if (s[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  auto push = [&](Tok k, std::size_t len) {
    out.push_back({k, s.substr(i, len), line, col});
    adv(len);
  };
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      adv(1);
    } else if (c == '%') {
      while (i < s.size() && s[i] != '\n') adv(1);
    } else if (c == '/' && i + 1 < s.size() && s[i + 1] == '*') {
      int l = line, cc = col;
      std::size_t e = s.find("*/", i + 2);
      if (e == std::string::npos) throw ParseError(ParseError::Kind::Syntax, l, cc, "unterminated comment");
      adv(e + 2 - i);
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '$') {
      std::size_t j = i + 1;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
      Tok k = c == '$' ? Tok::Dollar : (std::isupper(static_cast<unsigned char>(c)) ? Tok::Upper : Tok::Lower);
      push(k, j - i);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      push(Tok::Number, j - i);
    } else if (c == '\'') {
      std::size_t j = i + 1;
      while (j < s.size() && s[j] != '\'' && s[j] != '\n') j += (s[j] == '\\' ? 2 : 1);
      if (j >= s.size() || s[j] != '\'') throw ParseError(ParseError::Kind::Syntax, line, col, "unterminated quoted atom");
      push(Tok::Quoted, j + 1 - i);
    } else if (s.compare(i, 3, "<=>") == 0) {
      push(Tok::Iff, 3);
    } else if (s.compare(i, 2, "=>") == 0) {
      push(Tok::Implies, 2);
    } else if (s.compare(i, 2, "!=") == 0) {
      push(Tok::Neq, 2);
    } else {
      Tok k;
      switch (c) {
        case '(': k = Tok::LParen; break;
        case ')': k = Tok::RParen; break;
        case '[': k = Tok::LBrack; break;
        case ']': k = Tok::RBrack; break;
        case ',': k = Tok::Comma; break;
        case ':': k = Tok::Colon; break;
        case '.': k = Tok::Dot; break;
        case '@': k = Tok::At; break;
        case '=': k = Tok::Eq; break;
        case '!': k = Tok::Bang; break;
        case '?': k = Tok::Question; break;
        case '^': k = Tok::Caret; break;
        case '>': k = Tok::Gt; break;
        case '&': k = Tok::Amp; break;
        case '|': k = Tok::Pipe; break;
        case '~': k = Tok::Tilde; break;
        default:
          throw ParseError(ParseError::Kind::Syntax, line, col, std::string("unexpected character '") + c + "'");
      }
      push(k, 1);
    }
  }
  out.push_back({Tok::End, "", line, col});
  return out;
}

// ---------------------------------------------------------------------------
// surface syntax

struct Expr {
  enum K { Atom, Variable, App, Eq, Lam, Forall, Connective } k;
  std::string name;  // atom/variable name or connective spelling
  std::vector<std::shared_ptr<Expr>> kids;
  std::vector<std::pair<std::string, Type>> binders;
  int line = 0, col = 0;
};
using ExprP = std::shared_ptr<Expr>;

class Parser {
 public:
  Parser(const std::string& text, std::string source) : toks_(lex(text)) { prob_.source = std::move(source); }

  Problem run() {
    std::set<std::string> rule_names;
    while (peek().kind != Tok::End) {
      const Token& head = expect_word("thf");
      expect(Tok::LParen);
      Token name = next();
      if (name.kind != Tok::Lower && name.kind != Tok::Upper && name.kind != Tok::Number && name.kind != Tok::Quoted)
        fail(name, "expected a clause name");
      expect(Tok::Comma);
      Token role = next();
      if (role.kind != Tok::Lower) fail(role, "expected a role");
      expect(Tok::Comma);
      if (role.text == "type") {
        type_decl();
      } else if (role.text == "axiom" || role.text == "definition") {
        if (!rule_names.insert(name.text).second)
          throw ParseError(ParseError::Kind::Duplicate, name.line, name.col, "duplicate rule name " + name.text);
        prob_.rules.push_back(axiom(name.text));
      } else {
        throw ParseError(ParseError::Kind::Unsupported, role.line, role.col, "unsupported role " + role.text);
      }
      expect(Tok::RParen);
      expect(Tok::Dot);
      (void)head;
    }
    return std::move(prob_);
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  Problem prob_;

  const Token& peek() const { return toks_[pos_]; }
  Token next() { return toks_[pos_ == toks_.size() - 1 ? pos_ : pos_++]; }

  [[noreturn]] static void fail(const Token& t, const std::string& msg) {
    throw ParseError(ParseError::Kind::Syntax, t.line, t.col,
                     msg + (t.kind == Tok::End ? " at end of input" : ", found '" + t.text + "'"));
  }
  Token expect(Tok k) {
    if (peek().kind != k) {
      static const char* names[] = {"(", ")", "[", "]", ",", ":", ".", "@", "=", "!=", "!", "?", "^", ">",
                                    "&", "|", "~", "=>", "<=>", "name", "variable", "$word", "quoted", "number", "end"};
      fail(peek(), std::string("expected '") + names[static_cast<int>(k)] + "'");
    }
    return next();
  }
  const Token& expect_word(const std::string& w) {
    if (peek().kind != Tok::Lower || peek().text != w) {
      if (peek().kind == Tok::Lower && (peek().text == "include" || peek().text == "tff" || peek().text == "fof" ||
                                        peek().text == "cnf"))
        throw ParseError(ParseError::Kind::Unsupported, peek().line, peek().col, peek().text + " is not supported");
      fail(peek(), "expected '" + w + "'");
    }
    return toks_[pos_++];
  }

  bool is_name(const Token& t) const { return t.kind == Tok::Lower || t.kind == Tok::Quoted; }

  // -- types

  Type type_expr() {
    Type dom = type_unary();
    if (peek().kind == Tok::Gt) {
      next();
      return Type::arrow(dom, type_expr());
    }
    return dom;
  }
  Type type_unary() {
    Token t = next();
    if (t.kind == Tok::LParen) {
      Type ty = type_expr();
      expect(Tok::RParen);
      return ty;
    }
    if (is_name(t) || t.kind == Tok::Dollar) {
      if (prob_.base_index(t.text) < 0)
        throw ParseError(ParseError::Kind::UndeclaredType, t.line, t.col, "undeclared type " + t.text);
      return Type::base(t.text);
    }
    fail(t, "expected a type");
  }

  void type_decl() {
    int parens = 0;
    while (peek().kind == Tok::LParen) {
      next();
      ++parens;
    }
    Token sym = next();
    if (!is_name(sym)) fail(sym, "expected a symbol name");
    expect(Tok::Colon);
    if (peek().kind == Tok::Dollar && peek().text == "$tType") {
      next();
      if (prob_.base_index(sym.text) >= 0)
        throw ParseError(ParseError::Kind::Duplicate, sym.line, sym.col, "type " + sym.text + " declared twice");
      prob_.base_types.push_back(sym.text);
    } else {
      Type ty = type_expr();
      if (prob_.find_symbol(sym.text))
        throw ParseError(ParseError::Kind::Duplicate, sym.line, sym.col, "symbol " + sym.text + " declared twice");
      prob_.symbols.push_back(make_symbol(sym.text, ty, 0, static_cast<int>(prob_.symbols.size())));
    }
    for (int i = 0; i < parens; ++i) expect(Tok::RParen);
  }

  // -- expressions

  ExprP mk(Expr::K k, const Token& at) {
    auto e = std::make_shared<Expr>();
    e->k = k;
    e->line = at.line;
    e->col = at.col;
    return e;
  }

  ExprP expr() {
    ExprP lhs = app();
    for (;;) {
      Tok k = peek().kind;
      if (k == Tok::Eq || k == Tok::Neq || k == Tok::Amp || k == Tok::Pipe || k == Tok::Implies || k == Tok::Iff) {
        Token op = next();
        ExprP e = mk(k == Tok::Eq ? Expr::Eq : Expr::Connective, op);
        e->name = op.text;
        e->kids = {lhs, app()};
        lhs = e;
      } else {
        return lhs;
      }
    }
  }

  ExprP app() {
    ExprP e = unary();
    while (peek().kind == Tok::At) {
      Token at = next();
      ExprP a = mk(Expr::App, at);
      a->kids = {e, unary()};
      e = a;
    }
    return e;
  }

  std::vector<std::pair<std::string, Type>> binder_list() {
    expect(Tok::LBrack);
    std::vector<std::pair<std::string, Type>> out;
    for (;;) {
      Token v = expect(Tok::Upper);
      expect(Tok::Colon);
      out.emplace_back(v.text, type_expr());
      if (peek().kind == Tok::Comma) {
        next();
        continue;
      }
      break;
    }
    expect(Tok::RBrack);
    expect(Tok::Colon);
    return out;
  }

  ExprP unary() {
    Token t = next();
    switch (t.kind) {
      case Tok::LParen: {
        ExprP e = expr();
        expect(Tok::RParen);
        return e;
      }
      case Tok::Caret:
      case Tok::Bang:
      case Tok::Question: {
        ExprP e = mk(t.kind == Tok::Caret ? Expr::Lam : (t.kind == Tok::Bang ? Expr::Forall : Expr::Connective), t);
        e->name = t.text;
        e->binders = binder_list();
        e->kids = {unary()};
        return e;
      }
      case Tok::Tilde: {
        ExprP e = mk(Expr::Connective, t);
        e->name = "~";
        e->kids = {unary()};
        return e;
      }
      case Tok::Lower:
      case Tok::Quoted:
      case Tok::Dollar: {
        ExprP e = mk(t.kind == Tok::Dollar ? Expr::Connective : Expr::Atom, t);
        e->name = t.text;
        return e;
      }
      case Tok::Upper: {
        ExprP e = mk(Expr::Variable, t);
        e->name = t.text;
        return e;
      }
      default:
        fail(t, "expected a term");
    }
  }

  // -- conversion to terms

  struct Scope {
    std::vector<Var> vars;  // innermost last
  };

  Term to_term(const ExprP& e, Scope& sc) {
    switch (e->k) {
      case Expr::Atom: {
        Symbol f = prob_.find_symbol(e->name);
        if (!f) throw ParseError(ParseError::Kind::UnknownSymbol, e->line, e->col, "unknown symbol " + e->name);
        return Term::fun(f, {});
      }
      case Expr::Variable: {
        for (auto it = sc.vars.rbegin(); it != sc.vars.rend(); ++it)
          if (it->name == e->name) return Term::var(*it);
        throw ParseError(ParseError::Kind::UnknownSymbol, e->line, e->col, "unbound variable " + e->name);
      }
      case Expr::App: {
        Term f = to_term(e->kids[0], sc);
        Term a = to_term(e->kids[1], sc);
        try {
          return Term::app(f, a);
        } catch (const TypeError& err) {
          throw ParseError(ParseError::Kind::TypeMismatch, e->line, e->col,
                           "cannot apply " + to_string(f) + " : " + f.type().str() + " to " + to_string(a) + " : " +
                               a.type().str());
        }
      }
      case Expr::Lam: {
        std::size_t mark = sc.vars.size();
        for (const auto& [n, ty] : e->binders) sc.vars.push_back(Var{n, 0, ty});
        Term body = to_term(e->kids[0], sc);
        for (std::size_t i = sc.vars.size(); i-- > mark;) body = Term::lambda(sc.vars[i], body);
        sc.vars.resize(mark);
        return body;
      }
      case Expr::Eq:
        throw ParseError(ParseError::Kind::NonEquality, e->line, e->col, "equation nested inside a term");
      case Expr::Forall:
        throw ParseError(ParseError::Kind::NonEquality, e->line, e->col, "quantifier inside a term");
      case Expr::Connective:
        if (e->name == "|")
          throw ParseError(ParseError::Kind::NonUnit, e->line, e->col, "disjunction: only unit clauses are accepted");
        throw ParseError(ParseError::Kind::NonEquality, e->line, e->col,
                         "connective or predicate " + e->name + " is not allowed; only equations");
    }
    throw std::logic_error("unhandled expression");
  }

  Rule axiom(const std::string& name) {
    ExprP e = expr();
    Scope sc;
    while (e->k == Expr::Forall) {
      for (const auto& [n, ty] : e->binders) sc.vars.push_back(Var{n, 0, ty});
      e = e->kids[0];
    }
    if (e->k == Expr::Connective && e->name == "|")
      throw ParseError(ParseError::Kind::NonUnit, e->line, e->col, "disjunction: only unit clauses are accepted");
    if (e->k != Expr::Eq) {
      if (e->k == Expr::Connective) to_term(e, sc);
      throw ParseError(ParseError::Kind::NonEquality, e->line, e->col, "axiom " + name + " is not an equation");
    }
    Term l = to_term(e->kids[0], sc);
    Term r = to_term(e->kids[1], sc);
    if (l.type() != r.type())
      throw ParseError(ParseError::Kind::TypeMismatch, e->line, e->col,
                       "sides of " + name + " have types " + l.type().str() + " and " + r.type().str());
    return Rule{name, l, r};
  }
};

// ---------------------------------------------------------------------------
// arities

void count_args(const Term& t, std::map<std::string, int>& minimum) {
  Spine sp = spine(t);
  const Term& h = sp.head;
  if (h.is_fun()) {
    int n = static_cast<int>(h.args().size() + sp.args.size());
    auto [it, fresh] = minimum.emplace(h.symbol()->name, n);
    if (!fresh) it->second = std::min(it->second, n);
    for (const auto& a : h.args()) count_args(a, minimum);
  } else if (h.is_lam()) {
    count_args(h.body(), minimum);
  }
  for (const auto& a : sp.args) count_args(a, minimum);
}

Term refit(const Term& t, const std::map<std::string, Symbol>& syms) {
  Spine sp = spine(t);
  const Term& h = sp.head;
  std::vector<Term> args;
  Term head;
  if (h.is_fun()) {
    for (const auto& a : h.args()) args.push_back(refit(a, syms));
    for (const auto& a : sp.args) args.push_back(refit(a, syms));
    const Symbol& f = syms.at(h.symbol()->name);
    std::vector<Term> direct(args.begin(), args.begin() + f->arity);
    args.erase(args.begin(), args.begin() + f->arity);
    head = Term::fun(f, std::move(direct));
  } else {
    for (const auto& a : sp.args) args.push_back(refit(a, syms));
    head = h.is_lam() ? Term::lam(h.binder_type(), refit(h.body(), syms), h.hint()) : h;
  }
  return Term::apps(head, args);
}

}  // namespace

Problem parse_problem(const std::string& text, const std::string& source) { return Parser(text, source).run(); }

Problem infer_arities(const Problem& p) {
  std::map<std::string, int> minimum;
  for (const auto& r : p.rules) {
    count_args(r.lhs, minimum);
    count_args(r.rhs, minimum);
  }
  Problem out;
  out.base_types = p.base_types;
  out.source = p.source;
  std::map<std::string, Symbol> syms;
  for (const auto& s : p.symbols) {
    auto it = minimum.find(s->name);
    int ar = it == minimum.end() ? 0 : std::min(it->second, s->type.arrow_count());
    Symbol ns = make_symbol(s->name, s->type, ar, static_cast<int>(out.symbols.size()));
    out.symbols.push_back(ns);
    syms[s->name] = ns;
  }
  for (const auto& r : p.rules) out.rules.push_back(Rule{r.name, refit(r.lhs, syms), refit(r.rhs, syms)});
  return out;
}

const Problem& validate_rules(const Problem& p) {
  std::vector<std::string> issues;
  for (const auto& r : p.rules) {
    const std::string who = "rule " + r.name + ": ";
    if (spine(r.lhs).head.is_var()) issues.push_back(who + "left-hand side " + to_string(r.lhs) + " is headed by a variable");
    if (r.lhs.type() != r.rhs.type())
      issues.push_back(who + "sides have different types " + r.lhs.type().str() + " and " + r.rhs.type().str());
    VarSet lv = free_vars(r.lhs);
    for (const auto& v : free_vars(r.rhs))
      if (!lv.count(v)) issues.push_back(who + "variable " + v.str() + " occurs only on the right-hand side");
    for (const auto* side : {&r.lhs, &r.rhs}) {
      if (!is_beta_eta_normal(*side))
        issues.push_back(who + to_string(*side) + " is not beta-eta normal; its normal form is " +
                         to_string(beta_eta_normalize(*side)));
    }
  }
  if (!issues.empty()) throw ValidationError(std::move(issues));
  return p;
}

Problem load_problem_text(const std::string& text, const std::string& source) {
  Problem p = infer_arities(parse_problem(text, source));
  validate_rules(p);
  return p;
}

Problem load_problem_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return load_problem_text(ss.str(), path);
}

// ---------------------------------------------------------------------------
// printing

std::string print_type_thf(const Type& t) {
  if (t.is_base()) return t.name();
  std::string d = print_type_thf(t.domain());
  if (t.domain().is_arrow()) d = "(" + d + ")";
  return d + " > " + print_type_thf(t.codomain());
}

namespace {

struct ThfPrinter {
  std::set<std::string> reserved;
  std::vector<std::string> ctx;

  static std::string var_name(const Var& v) { return v.fresh > 0 ? "Z_" + std::to_string(v.fresh) : v.name; }

  std::string binder(const std::string& hint) {
    std::string base = (!hint.empty() && std::isupper(static_cast<unsigned char>(hint[0]))) ? hint : "X";
    auto taken = [&](const std::string& n) {
      return reserved.count(n) || std::find(ctx.begin(), ctx.end(), n) != ctx.end();
    };
    if (!taken(base)) return base;
    for (int i = 1;; ++i)
      if (!taken(base + std::to_string(i))) return base + std::to_string(i);
  }

  std::string print(const Term& t) {
    switch (t.kind()) {
      case Term::Kind::Bound:
        if (t.index() >= static_cast<int>(ctx.size())) throw std::logic_error("dangling index in THF output");
        return ctx[ctx.size() - 1 - t.index()];
      case Term::Kind::Free:
        return var_name(t.var());
      case Term::Kind::Fun: {
        if (t.args().empty()) return t.symbol()->name;
        std::string s = "(" + t.symbol()->name;
        for (const auto& a : t.args()) s += " @ " + print(a);
        return s + ")";
      }
      case Term::Kind::App: {
        Spine sp = spine(t);
        std::string s = "(" + print(sp.head);
        for (const auto& a : sp.args) s += " @ " + print(a);
        return s + ")";
      }
      case Term::Kind::Lam: {
        std::string n = binder(t.hint());
        std::string s = "(^[" + n + ":" + print_type_thf(t.binder_type()) + "]: ";
        ctx.push_back(n);
        s += print(t.body());
        ctx.pop_back();
        return s + ")";
      }
    }
    return "?";
  }
};

}  // namespace

std::string print_term_thf(const Term& t) {
  ThfPrinter p;
  for (const auto& v : free_vars(t)) p.reserved.insert(ThfPrinter::var_name(v));
  return p.print(t);
}

std::string print_problem_thf(const Problem& p) {
  std::ostringstream os;
  int n = 0;
  for (const auto& b : p.base_types) os << "thf(ty" << n++ << ", type, " << b << ": $tType).\n";
  for (const auto& s : p.symbols) os << "thf(ty" << n++ << ", type, " << s->name << ": " << print_type_thf(s->type) << ").\n";
  for (const auto& r : p.rules) {
    VarSet vs = free_vars(r.lhs);
    for (const auto& v : free_vars(r.rhs)) vs.insert(v);
    ThfPrinter pr;
    for (const auto& v : vs) pr.reserved.insert(ThfPrinter::var_name(v));
    os << "thf(" << r.name << ", axiom, ";
    if (!vs.empty()) {
      os << "![";
      bool first = true;
      for (const auto& v : vs) {
        os << (first ? "" : ", ") << ThfPrinter::var_name(v) << ":" << print_type_thf(v.type);
        first = false;
      }
      os << "]: ";
    }
    os << "(" << pr.print(r.lhs) << " = " << pr.print(r.rhs) << ")).\n";
  }
  return os.str();
}

}  // namespace hoterm

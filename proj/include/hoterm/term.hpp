#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "hoterm/type.hpp"

namespace hoterm {

/// A named (free) variable. `fresh > 0` marks variables minted by a FreshSupply;
/// those live in their own namespace and never clash with user variables.
struct Var {
  std::string name;
  int fresh = 0;
  Type type;

  friend bool operator==(const Var& a, const Var& b) {
    return a.fresh == b.fresh && a.name == b.name && a.type == b.type;
  }
  friend std::strong_ordering operator<=>(const Var& a, const Var& b) {
    if (auto c = a.fresh <=> b.fresh; c != 0) return c;
    if (auto c = a.name <=> b.name; c != 0) return c;
    return a.type <=> b.type;
  }
  std::size_t hash() const;
  std::string str() const;
};

using VarSet = std::set<Var>;

struct SymbolInfo {
  std::string name;
  Type type;
  int arity = 0;
  int id = -1;
};
using Symbol = std::shared_ptr<const SymbolInfo>;

Symbol make_symbol(std::string name, Type type, int arity, int id = -1);

struct TermNode;

/// Simply-typed lambda term with fixed-arity function-symbol nodes.
///
/// Binders are nameless (de Bruijn indices), so operator== is alpha-equivalence.
/// The hint string kept on Lam nodes only feeds the printer.
class Term {
 public:
  enum class Kind { Bound, Free, Fun, App, Lam };

  Term() = default;

  static Term bound(int index, Type type);
  static Term var(Var v);
  /// f(args); args.size() must equal the symbol's arity.
  static Term fun(Symbol f, std::vector<Term> args);
  static Term app(Term f, Term a);
  static Term apps(Term head, const std::vector<Term>& args);
  /// Raw abstraction over de Bruijn index 0 of `body`.
  static Term lam(Type binder, Term body, std::string hint = "x");
  /// lambda x. body, abstracting the free variable x.
  static Term lambda(const Var& x, const Term& body);

  bool valid() const { return node_ != nullptr; }
  Kind kind() const;
  bool is_bound() const { return kind() == Kind::Bound; }
  bool is_var() const { return kind() == Kind::Free; }
  bool is_fun() const { return kind() == Kind::Fun; }
  bool is_app() const { return kind() == Kind::App; }
  bool is_lam() const { return kind() == Kind::Lam; }

  const Type& type() const;
  int index() const;
  const Var& var() const;
  const Symbol& symbol() const;
  const std::vector<Term>& args() const;
  const Term& fun() const;
  const Term& arg() const;
  const Type& binder_type() const;
  const Term& body() const;
  const std::string& hint() const;

  std::size_t hash() const;
  int size() const;
  /// One past the largest dangling de Bruijn index; 0 for locally closed terms.
  int loose() const;
  /// Largest fresh-variable number occurring in the term (0 if none).
  int max_fresh() const;

  friend bool operator==(const Term& a, const Term& b);

  const TermNode* raw() const { return node_.get(); }

 private:
  explicit Term(std::shared_ptr<const TermNode> n) : node_(std::move(n)) {}
  std::shared_ptr<const TermNode> node_;
};

struct TermNode {
  Term::Kind kind;
  Type type;
  int index = 0;
  Var var;
  Symbol sym;
  std::vector<Term> kids;
  Type binder;
  std::string hint;
  std::size_t hash = 0;
  int size = 1;
  int loose = 0;
  int max_fresh = 0;
};

struct TermHash {
  std::size_t operator()(const Term& t) const { return t.hash(); }
};

class CapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller-scoped source of fresh variables.
class FreshSupply {
 public:
  explicit FreshSupply(int next = 1) : next_(next) {}
  Var fresh(Type type, std::string hint = "z") { return Var{std::move(hint), next_++, std::move(type)}; }
  int peek() const { return next_; }

 private:
  int next_;
};

using Substitution = std::map<Var, Term>;

VarSet free_vars(const Term& t);
bool occurs_free(const Term& t, const Var& x);
/// Does de Bruijn index `idx` (relative to the root of t) occur in t?
bool has_loose_index(const Term& t, int idx);

Term shift(const Term& t, int delta, int cutoff = 0);
/// body with index 0 replaced by value (value may itself have loose indices).
Term instantiate(const Term& body, const Term& value);
/// Replace free occurrences of x by index 0 (the inverse of instantiate).
Term abstract(const Term& t, const Var& x);
/// For a Lam node: its body with the bound variable replaced by z.
Term open_with(const Term& lam, const Var& z);

/// Simultaneous capture-avoiding substitution.
Term substitute(const Term& t, const Substitution& sigma);

Term beta_normalize(const Term& t);
/// Eta-contract a beta-normal term to fixed point. Fun nodes are atomic.
Term eta_normalize(const Term& t);
Term beta_eta_normalize(const Term& t);
bool is_beta_eta_normal(const Term& t);

std::vector<Term> one_step_reducts(const Term& t);
/// Every t' with t ->*_{beta eta} t', by exhaustive graph search (t first).
std::vector<Term> enumerate_beta_eta_reducts(const Term& t, std::size_t size_cap);

struct Subterm {
  std::vector<int> path;
  Term term;
};
/// All subterms with their access paths; binders crossed are replaced by fresh variables.
std::vector<Subterm> subterm_positions(const Term& t, FreshSupply& supply);

struct Spine {
  Term head;
  std::vector<Term> args;
};
Spine spine(const Term& t);

std::string to_string(const Term& t);
std::ostream& operator<<(std::ostream& os, const Term& t);

}  // namespace hoterm

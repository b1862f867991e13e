#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "hoterm/problem.hpp"
#include "hoterm/structure.hpp"

namespace hoterm {

/// Normal: the NCPO on beta-eta normal forms. Plain: the CPO companion on arbitrary terms.
enum class Mode { Normal, Plain };

/// Gt, GtTau, Ge, GeTau are the four comparison relations; AppHelper is the auxiliary
/// relation of the application rule; Struct is the step through a structurally smaller term.
enum class Rel { Gt, GtTau, Ge, GeTau, AppHelper, Struct };

struct ProofNode;
using Proof = std::shared_ptr<const ProofNode>;

/// One rule application. Which witness fields are set depends on the rule:
///   index     argument position (1-based), premise variant, or lex position
///   via_b     the basic subterm step, via_acc the accessible subterm step
///   witness   the structurally smaller term
///   fresh     the variable that replaced a bound one
///   removed   multiset extension: removed left elements (1-based)
///   assign    multiset extension, per right element: i > 0 equal to left i, -i dominated by left i
struct ProofNode {
  std::string rule;
  Rel rel = Rel::Gt;
  Mode mode = Mode::Normal;
  Term lhs, rhs;
  VarSet X;
  std::vector<Proof> children;
  int index = 0;
  std::optional<Term> via_b, via_acc, witness;
  std::optional<Var> fresh;
  std::vector<int> removed, assign;
};

struct EngineOptions {
  Mode mode = Mode::Normal;
  /// Use the split mul/lex rules for equal-precedence big symbols instead of the generic form.
  bool optimized_feq = true;
  /// Maximum number of strict judgments evaluated (0: unlimited).
  std::size_t budget = 0;
};

class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EngineStats {
  std::size_t judgments = 0;
  std::size_t memo_hits = 0;
};

/// Decides the order for one fixed parameter choice. Not thread-safe; use one engine per thread.
class OrderEngine {
 public:
  explicit OrderEngine(OrderParams params, EngineOptions options = {});

  /// Each returns a proof or nullptr. In normal mode both sides must be normal (TypeError otherwise).
  Proof gt(const Term& s, const Term& t, const VarSet& X = {});
  Proof gt_tau(const Term& s, const Term& t, const VarSet& X = {});
  Proof ge(const Term& s, const Term& t, const VarSet& X = {});
  Proof ge_tau(const Term& s, const Term& t, const VarSet& X = {});
  /// lhs > rhs with the empty variable set.
  Proof orient(const Rule& r);

  const OrderParams& params() const { return params_; }
  const EngineOptions& options() const { return options_; }
  const EngineStats& stats() const { return stats_; }

 private:
  struct Key {
    Term s, t;
    VarSet X;
    friend bool operator==(const Key& a, const Key& b) { return a.s == b.s && a.t == b.t && a.X == b.X; }
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const;
  };

  void check_input(const Term& s, const Term& t) const;
  Proof strict(const Term& s, const Term& t, const VarSet& X);
  Proof strict_tau(const Term& s, const Term& t, const VarSet& X);
  Proof weak(const Term& s, const Term& t, const VarSet& X);
  Proof weak_tau(const Term& s, const Term& t, const VarSet& X);
  Proof search(const Term& s, const Term& t, const VarSet& X);

  Proof big_rules(const Term& s, const Term& t, const VarSet& X);
  Proof small_rules(const Term& s, const Term& t, const VarSet& X);
  Proof app_rules(const Term& s, const Term& t, const VarSet& X);
  Proof lam_rules(const Term& s, const Term& t, const VarSet& X);
  Proof plain_rules(const Term& s, const Term& t, const VarSet& X);

  Proof big_subterm(const Term& s, const Term& t, const VarSet& X);
  Proof big_equal(const Term& s, const Term& t, const VarSet& X);
  Proof small_equal(const Term& s, const Term& t, const VarSet& X);
  /// t_i (>_tau or >>_X . >=_tau) u_j, with the structural alternative only if `with_struct`.
  Proof arg_dominates(const Term& ti, const Term& uj, const VarSet& X, bool with_struct);
  Proof app_helper(const Term& s, const Term& w, const VarSet& X);
  bool nonversatile_ok(const Term& s) const;

  OrderParams params_;
  EngineOptions options_;
  EngineStats stats_;
  std::unordered_map<Key, Proof, KeyHash> memo_;
  std::unordered_set<Key, KeyHash> active_;
};

/// A variable for opening a binder in the judgment (s, t, X): the id is one past every
/// fresh id occurring in s, t and X, so it is deterministic per judgment.
Var judgment_fresh(const Term& s, const Term& t, const VarSet& X, const Type& type);

Proof ncpo_gt(const Term& s, const Term& t, const VarSet& X, const OrderParams& params, EngineOptions options = {});
Proof ncpo_gt_tau(const Term& s, const Term& t, const VarSet& X, const OrderParams& params,
                  EngineOptions options = {});
/// Plain mode; terms need not be normal.
Proof cpo_gt(const Term& s, const Term& t, const VarSet& X, const OrderParams& params, EngineOptions options = {});
Proof orient_rule(const Rule& r, const OrderParams& params, EngineOptions options = {});

std::string rel_symbol(Rel rel, Mode mode);
/// One node per line, children indented by two spaces.
std::string format_trace(const Proof& p);

class TraceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Re-validates every node of a proof without searching. Throws TraceError on the first
/// node whose side conditions or premises do not hold.
void check_trace(const Proof& p, const OrderParams& params, const EngineOptions& options);
bool trace_valid(const Proof& p, const OrderParams& params, const EngineOptions& options);

std::size_t trace_size(const Proof& p);
/// Every rule name used in the proof, in preorder.
std::vector<std::string> trace_rules(const Proof& p);

}  // namespace hoterm

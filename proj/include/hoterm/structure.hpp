#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "hoterm/problem.hpp"
#include "hoterm/type_order.hpp"

namespace hoterm {

enum class Status { Mul, Lex };

/// One concrete choice of every order parameter.
struct OrderParams {
  BaseLevels levels;
  std::map<std::string, int> prec;
  std::map<std::string, Status> status;
  std::map<std::string, bool> big;
  std::map<std::string, std::set<int>> acc;  // 1-based, over the full argument list
  std::map<std::string, bool> basic;

  /// Every base at level 0, every symbol at precedence 0, mul, big, no acc, nothing basic.
  static OrderParams defaults(const Problem& p);

  int prec_of(const std::string& f) const;
  Status status_of(const std::string& f) const;
  bool is_big(const std::string& f) const;
  const std::set<int>& acc_of(const std::string& f) const;
  bool is_basic(const std::string& base) const;

  bool prec_gt(const std::string& f, const std::string& g) const { return prec_of(f) > prec_of(g); }
  bool prec_eq(const std::string& f, const std::string& g) const { return prec_of(f) == prec_of(g); }
};

class ParamsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parse the line-based parameter format on top of OrderParams::defaults(p).
OrderParams parse_params(const std::string& text, const Problem& p);
OrderParams load_params_file(const std::string& path, const Problem& p);
std::string format_params(const OrderParams& params, const Problem& p);

/// Every violated parameter constraint, as readable messages; empty if valid.
std::vector<std::string> validate_params(const Problem& p, const OrderParams& params);

/// Sufficient syntactic condition for nonversatility. Throws TypeError on non-normal input.
bool is_nonversatile(const Term& t);
/// Same check without the normal-form guard; dangling indices count as variables.
bool is_nonversatile_unchecked(const Term& t);

/// Closed base-typed subterms reachable from s through nonversatile nodes
/// (through any node when `require_nonversatile` is false). Parameter independent:
/// the caller still has to require basic(type of target).
std::vector<Term> bsubt_candidates(const Term& s, bool require_nonversatile = true);
/// Throws TypeError if `require_nonversatile` and s is versatile.
std::vector<Term> bsubt_targets(const Term& s, const OrderParams& params, bool require_nonversatile = true);

struct AccStep {
  Symbol f;
  int index;  // 1-based
};

struct AccCandidate {
  Term target;
  std::vector<AccStep> path;  // all steps must be accessible arguments
};

/// Every t with s |>acc t under the assumption that all argument positions are accessible.
std::vector<AccCandidate> asubt_candidates(const Term& s);
bool acc_path_enabled(const std::vector<AccStep>& path, const OrderParams& params);
std::vector<Term> asubt_targets(const Term& s, const OrderParams& params);

struct StructCandidate {
  Term witness;              // u x1 ... xk
  std::vector<AccStep> path; // s |>acc u
  std::vector<Var> xs;
};

/// Every w with s >>_X w under the assumption that all argument positions are accessible.
/// A spine of k = 0 variables is allowed unless the library is built with HOTERM_STRICT_SPINE.
std::vector<StructCandidate> structsm_candidates(const Term& s, const VarSet& X);
bool structsm(const Term& s, const Term& t, const VarSet& X, const OrderParams& params);

/// Whether k = 0 spines are admitted in this build.
bool structsm_allows_empty_spine();

}  // namespace hoterm

#pragma once
// SMT-LIB 2 encoding of orientability over symbolic order parameters, and the solver process.

#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "hoterm/problem.hpp"
#include "hoterm/structure.hpp"

namespace hoterm {

enum class AtomKind { Prec, Level, Mul, Big, Acc, Basic };

/// A parameter variable. Prec and Level are integers, the rest booleans.
struct Atom {
  AtomKind kind;
  std::string subject;  // symbol or base type name
  int index = 0;        // Acc only, 1-based
  std::string name;     // SMT symbol, without |quotes|

  bool is_int() const { return kind == AtomKind::Prec || kind == AtomKind::Level; }
};

/// prec_f, level_a, mul_f, big_f, acc_f_i, basic_a.
std::string atom_name(AtomKind kind, const std::string& subject, int index = 0);
/// Every parameter variable of a problem, in a fixed order.
std::vector<Atom> problem_atoms(const Problem& p);

/// Hash-consed formula DAG. Def nodes name a judgment; their bodies live in `defs`.
class FormulaPool {
 public:
  using F = int;
  enum class Op { True, False, Var, Gt, Ge, Eq, Not, And, Or, Def };
  struct Node {
    Op op;
    int a = 0, b = 0;  // atom ids (Var, Gt, Ge, Eq) or def id (Def)
    std::vector<F> kids;
  };

  FormulaPool();
  F truth() const { return 0; }
  F falsity() const { return 1; }
  F var(int atom);
  F gt(int x, int y);
  F ge(int x, int y);
  F eq(int x, int y);
  F neg(F f);
  F conj(std::vector<F> fs);
  F disj(std::vector<F> fs);
  F conj(F a, F b) { return conj(std::vector<F>{a, b}); }
  F disj(F a, F b) { return disj(std::vector<F>{a, b}); }
  F def(int id);

  const Node& node(F f) const { return nodes_[static_cast<std::size_t>(f)]; }
  std::size_t size() const { return nodes_.size(); }

 private:
  F intern(Node n);
  std::vector<Node> nodes_;
  std::map<std::tuple<int, int, int, std::vector<F>>, F> index_;
};

struct EncodeOptions {
  /// Must match the engine option the result is checked with.
  bool optimized_feq = true;
  /// Cap on formula nodes (0: unlimited).
  std::size_t node_budget = 2'000'000;
};

class EncodingTooLarge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The encoded problem. The script asserts the global constraints, one definition per
/// judgment, and every rule root.
struct Encoding {
  FormulaPool pool;
  std::vector<Atom> atoms;
  std::vector<FormulaPool::F> global;
  std::vector<FormulaPool::F> defs;   // body of d_i
  std::vector<FormulaPool::F> roots;  // per rule
  std::vector<std::string> rule_names;
  int symbol_count = 0, base_count = 0;

  bool evaluate(FormulaPool::F f, const OrderParams& params) const;
  bool global_holds(const OrderParams& params) const;
  bool rule_holds(std::size_t i, const OrderParams& params) const;
};

/// Throws TypeError if a rule side is not beta-eta normal, EncodingTooLarge past the budget.
Encoding encode_problem(const Problem& p, EncodeOptions options = {});
std::string smt_script(const Encoding& e);

enum class SolverStatus { Sat, Unsat, Unknown };

struct SolverResult {
  SolverStatus status = SolverStatus::Unknown;
  std::string model;  // the get-model answer, if sat
  std::string stderr_text;
  bool timed_out = false;
  double seconds = 0;
};

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Runs `command` through /bin/sh, feeds the script on stdin and reads the answer.
/// A run past `timeout_seconds` is killed and reported as unknown.
SolverResult run_solver(const std::string& script, const std::string& command, double timeout_seconds);

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ModelValue {
  bool is_int = false;
  long long value = 0;  // booleans as 0/1
};

/// Bindings of a get-model answer: (define-fun name () Sort value) entries.
std::map<std::string, ModelValue> parse_model(const std::string& text);
/// Missing bindings take the defaults (level 0, prec 0, mul, big, acc empty, not basic).
OrderParams decode_model(const std::string& text, const Problem& p);

}  // namespace hoterm

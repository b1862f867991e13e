#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hoterm/order.hpp"
#include "hoterm/smt.hpp"

namespace hoterm {

enum class Verdict { Proved, NotProvable, Unknown };
enum class Backend { Smt, Enum };

std::string verdict_name(Verdict v);

struct EnumBounds {
  int max_symbols = 6;
  int max_bases = 3;
  /// Parameter candidates tried before giving up (0: unlimited).
  std::size_t max_candidates = 20'000'000;
  /// Take the largest valid acc set instead of every subset. Exact: acc only enables rule steps,
  /// and given levels, basic and big the valid positions are independent of each other.
  bool maximal_acc = true;
  /// Fix the status of precedence classes made only of constants. Exact: status never matters
  /// for a left-hand head without arguments.
  bool skip_constant_status = true;
};

struct SearchConfig {
  Backend backend = Backend::Smt;
  std::string solver_command = "z3 -in";
  double timeout_seconds = 60;
  EncodeOptions encode;
  EnumBounds bounds;
  EngineOptions engine;
  /// If nonempty, the SMT script is written here before solving.
  std::string dump_smt_path;
};

struct SearchStats {
  std::size_t candidates = 0;   // enumeration: parameter choices checked
  std::size_t definitions = 0;  // smt: judgment variables
  std::size_t script_bytes = 0;
  std::size_t judgments = 0;    // re-check: engine judgments
  std::size_t memo_hits = 0;
  double solver_seconds = 0;
};

struct SearchResult {
  Verdict verdict = Verdict::Unknown;
  std::optional<OrderParams> params;  // when proved
  std::vector<Proof> traces;          // when proved, one per rule
  std::vector<std::string> diagnostics;
  SearchStats stats;
};

class BoundsExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A proved verdict whose parameters fail the independent re-check.
class SoundnessError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Every weak order on n elements as rank vectors with ranks 0..k-1 all used, in lexicographic order.
std::vector<std::vector<int>> ordered_partitions(int n);

/// Tries every parameter choice in the bounded space; first success or not provable.
SearchResult enumerate_search(const Problem& p, const EnumBounds& bounds = {}, EngineOptions engine = {});

/// Orients every rule with fixed parameters. Not provable if the parameters are invalid
/// or some rule fails; the diagnostics say which.
SearchResult check_params(const Problem& p, const OrderParams& params, EngineOptions engine = {});

/// Search with the configured backend, then re-validate any parameters found with the
/// order engine alone. Throws SoundnessError if that re-check fails.
SearchResult prove(const Problem& p, const SearchConfig& config = {});

}  // namespace hoterm

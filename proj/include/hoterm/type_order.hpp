#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>

#include "hoterm/type.hpp"

namespace hoterm {

/// Integer levels on base types; a > b iff level(a) > level(b). Equal levels are incomparable.
class BaseLevels {
 public:
  BaseLevels() = default;
  explicit BaseLevels(std::map<std::string, int> levels) : levels_(std::move(levels)) {}

  void set(const std::string& base, int level) { levels_[base] = level; }
  /// Throws TypeError for unknown bases.
  int level(const std::string& base) const;
  bool contains(const std::string& base) const { return levels_.count(base) != 0; }
  const std::map<std::string, int>& levels() const { return levels_; }

 private:
  std::map<std::string, int> levels_;
};

/// Strict base order a > b.
bool base_gt(const BaseLevels& L, const std::string& a, const std::string& b);
/// a = b or a > b.
bool base_ge(const BaseLevels& L, const std::string& a, const std::string& b);

/// The admissible type order generated by the base levels.
bool type_gt(const BaseLevels& L, const Type& T, const Type& U);
bool type_ge(const BaseLevels& L, const Type& T, const Type& U);

/// Transitive closure of the type order together with the left-subterm step.
bool type_gtdot(const BaseLevels& L, const Type& T, const Type& U);
bool type_geqdot(const BaseLevels& L, const Type& T, const Type& U);

/// Every base b occurring in T satisfies a > b (strict) or a >= b.
bool base_dominates(const BaseLevels& L, const std::string& a, const Type& T, bool strict);

/// Positions are strings over {'1','2'}; "" is the root.
using Position = std::string;
using PositionSet = std::set<Position>;

PositionSet pos_plus(const Type& T);
PositionSet pos_minus(const Type& T);
PositionSet pos_of(const std::string& a, const Type& T);

struct PosSets {
  PositionSet plus, minus, of;
};
PosSets pos_sets(const std::string& a, const Type& T);

/// The five mutually recursive position sets used for small symbols.
struct SposSets {
  PositionSet S, R, N, L, C;
};

/// Memoizing evaluator for SposSets; one instance per analysis session.
class SposAnalysis {
 public:
  const SposSets& sets(const std::string& a, const Type& T);
  const PositionSet& spos(const std::string& a, const Type& T) { return sets(a, T).S; }

 private:
  std::map<std::pair<std::string, Type>, SposSets> memo_;
};

std::string format_positions(const PositionSet& s);

}  // namespace hoterm

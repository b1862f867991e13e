#include "hoterm/type_order.hpp"

namespace hoterm {

int BaseLevels::level(const std::string& base) const {
  auto it = levels_.find(base);
  if (it == levels_.end()) throw TypeError("no level for base type " + base);
  return it->second;
}

bool base_gt(const BaseLevels& L, const std::string& a, const std::string& b) { return L.level(a) > L.level(b); }

bool base_ge(const BaseLevels& L, const std::string& a, const std::string& b) {
  if (a == b) {
    L.level(a);  // still reject unknown bases
    return true;
  }
  return base_gt(L, a, b);
}

bool type_gt(const BaseLevels& L, const Type& T, const Type& U) {
  if (T.is_base()) return U.is_base() && base_gt(L, T.name(), U.name());
  if (type_ge(L, T.codomain(), U)) return true;
  return U.is_arrow() && U.domain() == T.domain() && type_gt(L, T.codomain(), U.codomain());
}

bool type_ge(const BaseLevels& L, const Type& T, const Type& U) { return T == U || type_gt(L, T, U); }

// A chain of type-order and left-subterm steps from T1 -> T2 either starts with a
// left step (then T1 reaches U), or with a type-order step to some V; in the latter
// case the chain collapses into T > U, T1 reaches U, or T2 reaches U.
bool type_gtdot(const BaseLevels& L, const Type& T, const Type& U) {
  if (type_gt(L, T, U)) return true;
  if (T.is_base()) return false;
  return type_geqdot(L, T.domain(), U) || type_geqdot(L, T.codomain(), U);
}

bool type_geqdot(const BaseLevels& L, const Type& T, const Type& U) { return T == U || type_gtdot(L, T, U); }

bool base_dominates(const BaseLevels& L, const std::string& a, const Type& T, bool strict) {
  if (T.is_base()) return strict ? base_gt(L, a, T.name()) : base_ge(L, a, T.name());
  return base_dominates(L, a, T.domain(), strict) && base_dominates(L, a, T.codomain(), strict);
}

namespace {

PositionSet prefixed(char c, const PositionSet& s) {
  PositionSet out;
  for (const auto& p : s) out.insert(c + p);
  return out;
}

PositionSet unite(PositionSet a, const PositionSet& b) {
  a.insert(b.begin(), b.end());
  return a;
}

}  // namespace

PositionSet pos_plus(const Type& T) {
  if (T.is_base()) return {""};
  return unite(prefixed('1', pos_minus(T.domain())), prefixed('2', pos_plus(T.codomain())));
}

PositionSet pos_minus(const Type& T) {
  if (T.is_base()) return {};
  return unite(prefixed('1', pos_plus(T.domain())), prefixed('2', pos_minus(T.codomain())));
}

PositionSet pos_of(const std::string& a, const Type& T) {
  if (T.is_base()) return T.name() == a ? PositionSet{""} : PositionSet{};
  return unite(prefixed('1', pos_of(a, T.domain())), prefixed('2', pos_of(a, T.codomain())));
}

PosSets pos_sets(const std::string& a, const Type& T) { return {pos_plus(T), pos_minus(T), pos_of(a, T)}; }

const SposSets& SposAnalysis::sets(const std::string& a, const Type& T) {
  auto key = std::make_pair(a, T);
  if (auto it = memo_.find(key); it != memo_.end()) return it->second;
  SposSets r;
  if (T.is_base()) {
    if (T.name() == a) r.C = {""};
  } else {
    const SposSets& u = sets(a, T.domain());
    const SposSets& v = sets(a, T.codomain());
    r.S = unite(prefixed('1', u.N), prefixed('2', v.S));
    r.R = r.S;
    r.N = unite(prefixed('1', u.S), prefixed('2', unite(v.L, v.C)));
    r.C = r.N;
    r.L = unite(unite(r.C, prefixed('1', unite(u.S, u.N))), prefixed('2', unite(v.L, v.C)));
  }
  return memo_.emplace(std::move(key), std::move(r)).first->second;
}

std::string format_positions(const PositionSet& s) {
  std::string out = "{";
  bool first = true;
  for (const auto& p : s) {
    out += first ? "" : ", ";
    out += p.empty() ? "ε" : p;
    first = false;
  }
  return out + "}";
}

}  // namespace hoterm

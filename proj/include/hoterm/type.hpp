#pragma once

#include <compare>
#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace hoterm {

struct TypeNode;

/// Simple type: a base type or an arrow. Immutable, shared, compared structurally.
class Type {
 public:
  enum class Kind { Base, Arrow };

  Type() = default;

  static Type base(std::string name);
  static Type arrow(Type domain, Type codomain);
  /// T1 -> ... -> Tn -> result
  static Type arrows(const std::vector<Type>& domains, Type result);

  bool valid() const { return node_ != nullptr; }
  Kind kind() const;
  bool is_base() const { return kind() == Kind::Base; }
  bool is_arrow() const { return kind() == Kind::Arrow; }

  const std::string& name() const;
  const Type& domain() const;
  const Type& codomain() const;

  std::size_t hash() const;
  /// Number of base-type leaves.
  int leaves() const;
  /// n for T1 -> ... -> Tn -> a.
  int arrow_count() const;
  /// [T1, ..., Tn] for T1 -> ... -> Tn -> a.
  std::vector<Type> arg_types() const;
  /// The base type a of T1 -> ... -> Tn -> a.
  const Type& result_base() const;
  /// Type remaining after consuming k arguments.
  Type drop_args(int k) const;
  /// Does the base type named `base` occur anywhere in this type?
  bool mentions(const std::string& base) const;
  void collect_bases(std::vector<std::string>& out) const;

  friend bool operator==(const Type& a, const Type& b);
  friend std::strong_ordering operator<=>(const Type& a, const Type& b);

  std::string str() const;

 private:
  explicit Type(std::shared_ptr<const TypeNode> n) : node_(std::move(n)) {}
  std::shared_ptr<const TypeNode> node_;
};

struct TypeNode {
  Type::Kind kind;
  std::string name;
  Type dom, cod;
  std::size_t hash = 0;
  int leaves = 1;
  int arrows = 0;
};

struct TypeHash {
  std::size_t operator()(const Type& t) const { return t.hash(); }
};

class TypeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::ostream& operator<<(std::ostream& os, const Type& t);

inline std::size_t hash_mix(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

}  // namespace hoterm

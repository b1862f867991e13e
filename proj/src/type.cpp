#include "hoterm/type.hpp"

#include <functional>
#include <ostream>

namespace hoterm {

Type Type::base(std::string name) {
  auto n = std::make_shared<TypeNode>();
  n->kind = Kind::Base;
  n->hash = hash_mix(0x51ed27, std::hash<std::string>{}(name));
  n->name = std::move(name);
  return Type(std::move(n));
}

Type Type::arrow(Type domain, Type codomain) {
  if (!domain.valid() || !codomain.valid()) throw TypeError("arrow over invalid type");
  auto n = std::make_shared<TypeNode>();
  n->kind = Kind::Arrow;
  n->hash = hash_mix(hash_mix(0xa77, domain.hash()), codomain.hash());
  n->leaves = domain.leaves() + codomain.leaves();
  n->arrows = codomain.arrow_count() + 1;
  n->dom = std::move(domain);
  n->cod = std::move(codomain);
  return Type(std::move(n));
}

Type Type::arrows(const std::vector<Type>& domains, Type result) {
  for (auto it = domains.rbegin(); it != domains.rend(); ++it) result = arrow(*it, std::move(result));
  return result;
}

Type::Kind Type::kind() const { return node_->kind; }

const std::string& Type::name() const {
  if (!is_base()) throw TypeError("name() on arrow type");
  return node_->name;
}

const Type& Type::domain() const {
  if (!is_arrow()) throw TypeError("domain() on base type");
  return node_->dom;
}

const Type& Type::codomain() const {
  if (!is_arrow()) throw TypeError("codomain() on base type");
  return node_->cod;
}

std::size_t Type::hash() const { return node_->hash; }
int Type::leaves() const { return node_->leaves; }
int Type::arrow_count() const { return node_->arrows; }

std::vector<Type> Type::arg_types() const {
  std::vector<Type> out;
  const Type* t = this;
  while (t->is_arrow()) {
    out.push_back(t->domain());
    t = &t->codomain();
  }
  return out;
}

const Type& Type::result_base() const {
  const Type* t = this;
  while (t->is_arrow()) t = &t->codomain();
  return *t;
}

Type Type::drop_args(int k) const {
  Type t = *this;
  for (int i = 0; i < k; ++i) {
    if (!t.is_arrow()) throw TypeError("too many arguments for type " + str());
    t = t.codomain();
  }
  return t;
}

bool Type::mentions(const std::string& b) const {
  if (is_base()) return node_->name == b;
  return node_->dom.mentions(b) || node_->cod.mentions(b);
}

void Type::collect_bases(std::vector<std::string>& out) const {
  if (is_base()) {
    out.push_back(node_->name);
    return;
  }
  node_->dom.collect_bases(out);
  node_->cod.collect_bases(out);
}

bool operator==(const Type& a, const Type& b) {
  if (a.node_ == b.node_) return true;
  if (!a.node_ || !b.node_) return false;
  if (a.node_->hash != b.node_->hash || a.node_->kind != b.node_->kind) return false;
  if (a.is_base()) return a.node_->name == b.node_->name;
  return a.node_->dom == b.node_->dom && a.node_->cod == b.node_->cod;
}

std::strong_ordering operator<=>(const Type& a, const Type& b) {
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  if (!a.node_) return std::strong_ordering::less;
  if (!b.node_) return std::strong_ordering::greater;
  if (a.node_->kind != b.node_->kind)
    return a.is_base() ? std::strong_ordering::less : std::strong_ordering::greater;
  if (a.is_base()) return a.node_->name <=> b.node_->name;
  if (auto c = a.node_->dom <=> b.node_->dom; c != 0) return c;
  return a.node_->cod <=> b.node_->cod;
}

std::string Type::str() const {
  if (!node_) return "<invalid>";
  if (is_base()) return node_->name;
  std::string d = node_->dom.str();
  if (node_->dom.is_arrow()) d = "(" + d + ")";
  return d + "→" + node_->cod.str();
}

std::ostream& operator<<(std::ostream& os, const Type& t) { return os << t.str(); }

}  // namespace hoterm

#pragma once

#include <string>
#include <vector>

#include "hoterm/term.hpp"

namespace hoterm {

struct Rule {
  std::string name;
  Term lhs;
  Term rhs;
};

/// A higher-order rewrite system. Symbol ids are their positions in `symbols`.
struct Problem {
  std::vector<std::string> base_types;
  std::vector<Symbol> symbols;
  std::vector<Rule> rules;
  std::string source;

  Symbol find_symbol(const std::string& name) const;
  /// -1 if unknown.
  int base_index(const std::string& name) const;
};

}  // namespace hoterm

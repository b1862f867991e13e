#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "hoterm/problem.hpp"

namespace hoterm {

class ParseError : public std::runtime_error {
 public:
  enum class Kind { Syntax, UnknownSymbol, TypeMismatch, NonEquality, NonUnit, UndeclaredType, Duplicate, Unsupported };

  ParseError(Kind kind, int line, int col, const std::string& msg);

  Kind kind() const { return kind_; }
  int line() const { return line_; }
  int col() const { return col_; }

 private:
  Kind kind_;
  int line_, col_;
};

/// Rules that break the rewrite-rule conditions. what() lists every issue.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<std::string> issues);
  const std::vector<std::string>& issues() const { return issues_; }

 private:
  std::vector<std::string> issues_;
};

/// Parse the THF subset. Every symbol comes back with arity 0 (applications are App nodes).
Problem parse_problem(const std::string& text, const std::string& source = "<input>");

/// Give each symbol the minimum number of arguments it receives anywhere (capped by its type)
/// and rebuild all rule terms accordingly.
Problem infer_arities(const Problem& p);

/// Check the rewrite-rule conditions; throws ValidationError listing every violation.
const Problem& validate_rules(const Problem& p);

/// parse + infer_arities + validate_rules
Problem load_problem_text(const std::string& text, const std::string& source = "<input>");
Problem load_problem_file(const std::string& path);

std::string print_type_thf(const Type& t);
std::string print_term_thf(const Term& t);
/// THF text that parses back to an equivalent problem.
std::string print_problem_thf(const Problem& p);

}  // namespace hoterm

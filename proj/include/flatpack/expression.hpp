#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>

#include "flatpack/geometry.hpp"

namespace flatpack {

// Arithmetic over named parameters: numbers, + - * /, unary minus, parentheses
// and a fixed set of functions (sin/cos/tan/asin/acos/atan in degrees, atan2,
// sqrt, abs, min, max, floor, ceil, round). `pi` is a builtin constant; names
// may be dotted ("leg.h") so constraints can reach across components.
//
// parse throws Error("ParseError"); evaluate throws Error("EvalError") on
// unknown names, bad domains and division by zero. The original source text
// is kept verbatim for round-trip serialization.
class Expression {
 public:
  Expression() = default;

  static Expression parse(const std::string& text);

  double evaluate(const std::map<std::string, double>& env) const;

  const std::string& text() const { return text_; }

  // Referenced parameter names, builtin constants excluded.
  const std::set<std::string>& variables() const { return vars_; }

  // True for a plain number (an optional sign is allowed).
  bool is_literal() const;

  bool empty() const { return root_ == nullptr; }

  struct Node;  // defined in the implementation file

 private:
  std::shared_ptr<const Node> root_;
  std::string text_;
  std::set<std::string> vars_;
};

}  // namespace flatpack

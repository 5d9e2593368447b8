#include "flatpack/expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <vector>

namespace flatpack {

struct Expression::Node {
  enum class Op { number, variable, add, sub, mul, div, neg, call };
  Op op;
  double value = 0;
  std::string name;
  std::vector<std::shared_ptr<const Node>> args;
};

namespace {

constexpr double kPi = 3.14159265358979323846;

using NodePtr = std::shared_ptr<const Expression::Node>;
using Op = Expression::Node::Op;

NodePtr make(Op op, std::vector<NodePtr> args = {}, std::string name = {},
             double value = 0) {
  auto n = std::make_shared<Expression::Node>();
  n->op = op;
  n->value = value;
  n->name = std::move(name);
  n->args = std::move(args);
  return n;
}

int function_arity(const std::string& name) {
  static const std::map<std::string, int> table = {
      {"sin", 1},  {"cos", 1},  {"tan", 1},   {"asin", 1},  {"acos", 1},
      {"atan", 1}, {"atan2", 2}, {"sqrt", 1}, {"abs", 1},   {"min", 2},
      {"max", 2},  {"floor", 1}, {"ceil", 1}, {"round", 1}};
  auto it = table.find(name);
  return it == table.end() ? -1 : it->second;
}

struct Parser {
  const std::string& src;
  size_t pos = 0;

  explicit Parser(const std::string& s) : src(s) {}

  [[noreturn]] void fail(const std::string& why) const {
    throw Error("ParseError", why + " at offset " + std::to_string(pos) + " in \"" +
                                  src + "\"");
  }

  void skip_ws() {
    while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
  }

  bool eat(char c) {
    skip_ws();
    if (pos < src.size() && src[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos < src.size() ? src[pos] : '\0';
  }

  NodePtr parse_expr() {
    auto lhs = parse_term();
    for (;;) {
      if (eat('+')) lhs = make(Op::add, {lhs, parse_term()});
      else if (eat('-')) lhs = make(Op::sub, {lhs, parse_term()});
      else return lhs;
    }
  }

  NodePtr parse_term() {
    auto lhs = parse_unary();
    for (;;) {
      if (eat('*')) lhs = make(Op::mul, {lhs, parse_unary()});
      else if (eat('/')) lhs = make(Op::div, {lhs, parse_unary()});
      else return lhs;
    }
  }

  NodePtr parse_unary() {
    if (eat('-')) return make(Op::neg, {parse_unary()});
    return parse_primary();
  }

  NodePtr parse_primary() {
    char c = peek();
    if (c == '(') {
      ++pos;
      auto inner = parse_expr();
      if (!eat(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_name();
    fail(c == '\0' ? "unexpected end of expression"
                   : std::string("unexpected character '") + c + "'");
  }

  NodePtr parse_number() {
    size_t start = pos;
    while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) ++pos;
    if (pos < src.size() && src[pos] == '.') {
      ++pos;
      while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) ++pos;
    }
    if (pos < src.size() && (src[pos] == 'e' || src[pos] == 'E')) {
      size_t mark = pos++;
      if (pos < src.size() && (src[pos] == '+' || src[pos] == '-')) ++pos;
      if (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) {
        while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) ++pos;
      } else {
        pos = mark;  // the 'e' belongs to something else
      }
    }
    double value = 0;
    auto r = std::from_chars(src.data() + start, src.data() + pos, value);
    if (r.ec != std::errc{} || r.ptr != src.data() + pos) fail("bad number literal");
    return make(Op::number, {}, {}, value);
  }

  NodePtr parse_name() {
    size_t start = pos;
    auto name_char = [](char ch) {
      return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '.';
    };
    while (pos < src.size() && name_char(src[pos])) ++pos;
    std::string name = src.substr(start, pos - start);
    if (peek() == '(') {
      int arity = function_arity(name);
      if (arity < 0) fail("unknown function '" + name + "'");
      ++pos;
      std::vector<NodePtr> args;
      args.push_back(parse_expr());
      while (eat(',')) args.push_back(parse_expr());
      if (!eat(')')) fail("expected ')' after arguments of '" + name + "'");
      if (int(args.size()) != arity)
        fail("'" + name + "' takes " + std::to_string(arity) + " argument(s)");
      return make(Op::call, std::move(args), std::move(name));
    }
    return make(Op::variable, {}, std::move(name));
  }
};

double eval_node(const Expression::Node& n, const std::map<std::string, double>& env) {
  auto arg = [&](size_t i) { return eval_node(*n.args[i], env); };
  switch (n.op) {
    case Op::number: return n.value;
    case Op::variable: {
      auto it = env.find(n.name);
      if (it != env.end()) return it->second;
      if (n.name == "pi") return kPi;
      throw Error("EvalError", "unknown parameter '" + n.name + "'");
    }
    case Op::add: return arg(0) + arg(1);
    case Op::sub: return arg(0) - arg(1);
    case Op::mul: return arg(0) * arg(1);
    case Op::div: {
      double d = arg(1);
      if (d == 0) throw Error("EvalError", "division by zero");
      return arg(0) / d;
    }
    case Op::neg: return -arg(0);
    case Op::call: {
      double a = arg(0);
      if (n.name == "sin") return std::sin(a * kPi / 180);
      if (n.name == "cos") return std::cos(a * kPi / 180);
      if (n.name == "tan") return std::tan(a * kPi / 180);
      if (n.name == "asin" || n.name == "acos") {
        if (a < -1 || a > 1)
          throw Error("EvalError", n.name + " argument outside [-1, 1]");
        return (n.name == "asin" ? std::asin(a) : std::acos(a)) * 180 / kPi;
      }
      if (n.name == "atan") return std::atan(a) * 180 / kPi;
      if (n.name == "atan2") return std::atan2(a, arg(1)) * 180 / kPi;
      if (n.name == "sqrt") {
        if (a < 0) throw Error("EvalError", "sqrt of a negative number");
        return std::sqrt(a);
      }
      if (n.name == "abs") return std::abs(a);
      if (n.name == "min") return std::min(a, arg(1));
      if (n.name == "max") return std::max(a, arg(1));
      if (n.name == "floor") return std::floor(a);
      if (n.name == "ceil") return std::ceil(a);
      if (n.name == "round") return std::round(a);
      throw Error("EvalError", "unknown function '" + n.name + "'");
    }
  }
  throw Error("EvalError", "corrupt expression tree");
}

void collect_vars(const Expression::Node& n, std::set<std::string>& out) {
  if (n.op == Op::variable && n.name != "pi") out.insert(n.name);
  for (const auto& a : n.args) collect_vars(*a, out);
}

}  // namespace

Expression Expression::parse(const std::string& text) {
  Parser p(text);
  auto root = p.parse_expr();
  if (p.peek() != '\0') p.fail("trailing input");
  Expression e;
  e.root_ = std::move(root);
  e.text_ = text;
  collect_vars(*e.root_, e.vars_);
  return e;
}

double Expression::evaluate(const std::map<std::string, double>& env) const {
  if (!root_) throw Error("EvalError", "empty expression");
  double v = eval_node(*root_, env);
  if (!std::isfinite(v)) throw Error("EvalError", "expression result is not finite");
  return v;
}

bool Expression::is_literal() const {
  if (!root_) return false;
  const Node* n = root_.get();
  while (n->op == Node::Op::neg) n = n->args[0].get();
  return n->op == Node::Op::number;
}

}  // namespace flatpack

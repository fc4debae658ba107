#include "richards/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <vector>

namespace richards {

struct Expression::Node {
  enum class Op { constant, var_x, var_z, var_t, add, sub, mul, div, neg, sin, cos };
  Op op = Op::constant;
  double value = 0.0;
  std::shared_ptr<const Node> lhs, rhs;

  double eval(double x, double z, double t) const {
    switch (op) {
      case Op::constant: return value;
      case Op::var_x: return x;
      case Op::var_z: return z;
      case Op::var_t: return t;
      case Op::add: return lhs->eval(x, z, t) + rhs->eval(x, z, t);
      case Op::sub: return lhs->eval(x, z, t) - rhs->eval(x, z, t);
      case Op::mul: return lhs->eval(x, z, t) * rhs->eval(x, z, t);
      case Op::div: return lhs->eval(x, z, t) / rhs->eval(x, z, t);
      case Op::neg: return -lhs->eval(x, z, t);
      case Op::sin: return std::sin(lhs->eval(x, z, t));
      case Op::cos: return std::cos(lhs->eval(x, z, t));
    }
    return 0.0;
  }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Op = Expression::Node::Op;

NodePtr make(Op op, NodePtr lhs = nullptr, NodePtr rhs = nullptr, double value = 0.0) {
  auto n = std::make_shared<Expression::Node>();
  n->op = op;
  n->value = value;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

class Parser {
public:
  explicit Parser(const std::string& text) : text_(text) {}

  NodePtr run() {
    NodePtr e = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return e;
  }

private:
  const std::string& text_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError("expression error at position " + std::to_string(pos_) + ": " + msg +
                      " in \"" + text_ + "\"");
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool consume(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (consume('+'))
        lhs = make(Op::add, lhs, term());
      else if (consume('-'))
        lhs = make(Op::sub, lhs, term());
      else
        return lhs;
    }
  }

  NodePtr term() {
    NodePtr lhs = factor();
    for (;;) {
      if (consume('*'))
        lhs = make(Op::mul, lhs, factor());
      else if (consume('/'))
        lhs = make(Op::div, lhs, factor());
      else
        return lhs;
    }
  }

  NodePtr factor() {
    if (consume('-')) return make(Op::neg, factor());
    if (consume('+')) return factor();
    return primary();
  }

  NodePtr primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (consume('(')) {
      NodePtr e = expr();
      if (!consume(')')) fail("missing ')'");
      return e;
    }
    // UTF-8 pi character (0xCF 0x80).
    if (static_cast<unsigned char>(c) == 0xCF && pos_ + 1 < text_.size() &&
        static_cast<unsigned char>(text_[pos_ + 1]) == 0x80) {
      pos_ += 2;
      return make(Op::constant, nullptr, nullptr, std::numbers::pi);
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    fail("unexpected character");
  }

  NodePtr number() {
    const char* begin = text_.c_str() + pos_;
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin) fail("bad number");
    pos_ += static_cast<std::size_t>(end - begin);
    return make(Op::constant, nullptr, nullptr, v);
  }

  NodePtr identifier() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                                   text_[pos_] == '_'))
      ++pos_;
    std::string name = text_.substr(start, pos_ - start);
    if (name == "x") return make(Op::var_x);
    if (name == "z") return make(Op::var_z);
    if (name == "t") return make(Op::var_t);
    if (name == "pi") return make(Op::constant, nullptr, nullptr, std::numbers::pi);
    if (name == "sin" || name == "cos") {
      if (!consume('(')) fail("expected '(' after " + name);
      NodePtr arg = expr();
      if (!consume(')')) fail("missing ')'");
      return make(name == "sin" ? Op::sin : Op::cos, arg);
    }
    pos_ = start;
    fail("unknown identifier \"" + name + "\"");
  }
};

}  // namespace

Expression Expression::parse(const std::string& text) {
  Expression e;
  e.root_ = Parser(text).run();
  e.text_ = text;
  return e;
}

double Expression::operator()(double x, double z, double t) const {
  return root_->eval(x, z, t);
}

}  // namespace richards

#pragma once

#include <memory>
#include <stdexcept>
#include <string>

namespace richards {

class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Small arithmetic expression over (x, z, t): numbers, pi (also the
/// literal character), +, -, *, /, unary minus, parentheses, sin and cos.
class Expression {
public:
  /// Parses `text`; throws ConfigError with a position on bad input.
  static Expression parse(const std::string& text);

  double operator()(double x, double z, double t) const;
  const std::string& text() const { return text_; }

  struct Node;

private:
  std::shared_ptr<const Node> root_;
  std::string text_;
};

}  // namespace richards

#pragma once

#include "sdqw/common.hpp"

#include <memory>
#include <string>
#include <string_view>

namespace sdqw {

enum class Variable { X, T, X1, X2, A };

struct Bindings {
  double x = 0.0, t = 0.0, x1 = 0.0, x2 = 0.0, a = 0.0;
};

// Malformed expression text; column is 1-based.
class ParseError : public ValidationError {
 public:
  ParseError(const std::string& what, int column)
      : ValidationError(what + " at column " + std::to_string(column)), column_(column) {}
  int column() const { return column_; }

 private:
  int column_;
};

// Immutable expression tree over x, t, x1, x2, a with +, -, *, /, ^, unary minus,
// the constant pi and the functions cos, sin, acos, ln, exp, sqrt, pow(u, v).
class Expression {
 public:
  struct Node;

  Expression();  // the constant 0
  explicit Expression(double value);

  static Expression parse(std::string_view text);

  // Throws DomainError when a function leaves its domain or the result is not finite.
  double evaluate(const Bindings& b) const;
  Expression derivative(Variable v) const;
  bool depends_on(Variable v) const;
  bool is_constant() const;
  std::string to_string() const;

  // f(x, t) with a bound.
  ScalarField field(double a) const;
  // f(x1, x2, t) with a bound.
  std::function<double(double, double, double)> pair_field(double a) const;

 private:
  explicit Expression(std::shared_ptr<const Node> root) : root_(std::move(root)) {}
  std::shared_ptr<const Node> root_;
};

}  // namespace sdqw

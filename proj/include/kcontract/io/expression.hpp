#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "kcontract/nl_model.hpp"

namespace kc::io {

class ParseError : public std::invalid_argument {
 public:
  ParseError(const std::string& msg, std::size_t pos)
      : std::invalid_argument(msg + " at position " + std::to_string(pos + 1)), position(pos) {}
  std::size_t position;
};

/// Scalar expression over x1..xn: literals, + - * /, unary -, ^ with an
/// integer exponent, sin, cos and parentheses. Compiled to a postfix program.
class Expression {
 public:
  Expression() = default;
  static Expression parse(const std::string& text);

  double eval(const Vector& x) const;
  /// Value and exact gradient (forward-mode differentiation).
  double eval_grad(const Vector& x, Vector& grad) const;
  /// Enclosure of the range over a product of intervals.
  Interval eval_interval(const std::vector<Interval>& box) const;

  const std::string& text() const { return text_; }
  /// Largest variable index used (1-based); 0 if none.
  int max_variable() const { return max_var_; }

  static constexpr int kMaxDepth = 64;

 private:
  enum class Op { constant, variable, add, sub, mul, div, neg, pow, sin, cos };
  struct Instr {
    Op op;
    double value = 0.0;
    int index = 0;
  };
  friend class ExpressionParser;

  std::string text_;
  std::vector<Instr> code_;
  int max_var_ = 0;
};

}  // namespace kc::io

#ifndef VWAVE_EXPR_HPP
#define VWAVE_EXPR_HPP

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "vwave/dual.hpp"

namespace vwave {

// Closed expressions over the variables {x, u} with binary ops
// {+, -, *, /, ^const} and the unary functions {sin, cos, exp, sqrt, tanh}.
// An Expr is immutable; evaluation runs over a flattened postfix tape and is
// safe to call from many threads at once.
class Expr {
 public:
  Expr();  // the constant 0

  static Expr constant(double c);

  double operator()(double x, double u) const { return eval(x, u); }
  double eval(double x, double u) const;
  Dual1 eval_d1(double x, double u) const;
  Dual2 eval_d2(double x, double u) const;

  bool is_constant() const;   // references neither x nor u
  bool depends_on_x() const;
  bool depends_on_u() const;

  // Fully parenthesized text form; parse(to_string()) reproduces the tape.
  std::string to_string() const;

  struct Node;

 private:
  friend Expr parse_expr(std::string_view);
  explicit Expr(std::shared_ptr<const Node> root);

  std::shared_ptr<const Node> root_;
};

// Parses the expression grammar (see README for the EBNF). Throws ParseError
// with a byte position on syntax errors and unknown identifiers.
Expr parse_expr(std::string_view text);

}  // namespace vwave

#endif

#pragma once

#include <memory>
#include <span>
#include <string>

#include "srg/polynomial.hpp"

namespace srg {

/// Immutable scalar expression over x1..xn with sin/cos, used for frames whose
/// coefficients are not polynomial (e.g. the rototranslation group).
/// Evaluation is floating-point; differentiation is symbolic.
class Expr {
 public:
  enum class Kind { Const, Var, Add, Mul, Neg, Sin, Cos };

  Expr();  // the constant 0
  static Expr constant(double c);
  static Expr variable(std::size_t i);
  static Expr from_polynomial(const Polynomial& p);

  Kind kind() const;
  bool is_constant() const { return kind() == Kind::Const; }
  double constant_value() const;
  bool is_zero() const { return is_constant() && constant_value() == 0.0; }

  double evaluate(std::span<const double> x) const;
  Expr derivative(std::size_t i) const;
  std::string to_string() const;

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  Expr operator-() const;
  friend Expr sin(const Expr& a);
  friend Expr cos(const Expr& a);

 private:
  struct Node;
  static std::shared_ptr<const Node> zero_node();
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

}  // namespace srg

#include "srg/expr.hpp"

#include <cmath>
#include <sstream>

#include "srg/errors.hpp"

namespace srg {

struct Expr::Node {
  Kind kind;
  double value = 0.0;    // Const
  std::size_t var = 0;   // Var
  std::shared_ptr<const Node> a, b;  // operands
};

std::shared_ptr<const Expr::Node> Expr::zero_node() {
  static const auto z = std::make_shared<const Node>(Node{Kind::Const, 0.0, 0, nullptr, nullptr});
  return z;
}

Expr::Expr() : node_(zero_node()) {}

Expr Expr::constant(double c) {
  return Expr(std::make_shared<const Node>(Node{Kind::Const, c, 0, nullptr, nullptr}));
}

Expr Expr::variable(std::size_t i) {
  return Expr(std::make_shared<const Node>(Node{Kind::Var, 0.0, i, nullptr, nullptr}));
}

Expr Expr::from_polynomial(const Polynomial& p) {
  Expr sum = constant(0.0);
  for (const auto& [e, c] : p.terms()) {
    Expr t = constant(c.get_d());
    for (std::size_t i = 0; i < e.size(); ++i)
      for (unsigned k = 0; k < e[i]; ++k) t = t * variable(i);
    sum = sum + t;
  }
  return sum;
}

Expr::Kind Expr::kind() const { return node_->kind; }
double Expr::constant_value() const { return node_->value; }

Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) return Expr::constant(a.constant_value() + b.constant_value());
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  return Expr(std::make_shared<const Expr::Node>(Expr::Node{Expr::Kind::Add, 0.0, 0, a.node_, b.node_}));
}

Expr operator-(const Expr& a, const Expr& b) { return a + (-b); }

Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) return Expr::constant(a.constant_value() * b.constant_value());
  if (a.is_zero() || b.is_zero()) return Expr::constant(0.0);
  if (a.is_constant() && a.constant_value() == 1.0) return b;
  if (b.is_constant() && b.constant_value() == 1.0) return a;
  return Expr(std::make_shared<const Expr::Node>(Expr::Node{Expr::Kind::Mul, 0.0, 0, a.node_, b.node_}));
}

Expr Expr::operator-() const {
  if (is_constant()) return constant(-constant_value());
  if (kind() == Kind::Neg) return Expr(node_->a);
  return Expr(std::make_shared<const Node>(Node{Kind::Neg, 0.0, 0, node_, nullptr}));
}

Expr sin(const Expr& a) {
  if (a.is_constant()) return Expr::constant(std::sin(a.constant_value()));
  return Expr(std::make_shared<const Expr::Node>(Expr::Node{Expr::Kind::Sin, 0.0, 0, a.node_, nullptr}));
}

Expr cos(const Expr& a) {
  if (a.is_constant()) return Expr::constant(std::cos(a.constant_value()));
  return Expr(std::make_shared<const Expr::Node>(Expr::Node{Expr::Kind::Cos, 0.0, 0, a.node_, nullptr}));
}

double Expr::evaluate(std::span<const double> x) const {
  const Node& n = *node_;
  const Expr A(n.a), B(n.b);
  switch (n.kind) {
    case Kind::Const: return n.value;
    case Kind::Var:
      if (n.var >= x.size()) throw InvalidInput("expression variable out of range");
      return x[n.var];
    case Kind::Add: return A.evaluate(x) + B.evaluate(x);
    case Kind::Mul: return A.evaluate(x) * B.evaluate(x);
    case Kind::Neg: return -A.evaluate(x);
    case Kind::Sin: return std::sin(A.evaluate(x));
    case Kind::Cos: return std::cos(A.evaluate(x));
  }
  return 0.0;
}

Expr Expr::derivative(std::size_t i) const {
  const Node& n = *node_;
  const Expr A(n.a), B(n.b);
  switch (n.kind) {
    case Kind::Const: return constant(0.0);
    case Kind::Var: return constant(n.var == i ? 1.0 : 0.0);
    case Kind::Add: return A.derivative(i) + B.derivative(i);
    case Kind::Mul: return A.derivative(i) * B + A * B.derivative(i);
    case Kind::Neg: return -A.derivative(i);
    case Kind::Sin: return cos(A) * A.derivative(i);
    case Kind::Cos: return -(sin(A) * A.derivative(i));
  }
  return constant(0.0);
}

std::string Expr::to_string() const {
  const Node& n = *node_;
  const Expr A(n.a), B(n.b);
  std::ostringstream os;
  switch (n.kind) {
    case Kind::Const: os << n.value; break;
    case Kind::Var: os << 'x' << (n.var + 1); break;
    case Kind::Add: os << '(' << A.to_string() << " + " << B.to_string() << ')'; break;
    case Kind::Mul: os << A.to_string() << '*' << B.to_string(); break;
    case Kind::Neg: os << "-(" << A.to_string() << ')'; break;
    case Kind::Sin: os << "sin(" << A.to_string() << ')'; break;
    case Kind::Cos: os << "cos(" << A.to_string() << ')'; break;
  }
  return os.str();
}

}  // namespace srg
